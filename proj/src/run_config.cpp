#include "stereodecomp/run_config.hpp"

#include <fstream>
#include <sstream>

namespace stereodecomp {

namespace {

bool parse_switch(const std::string& value, const std::string& key) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw InvalidConfig("config key '" + key + "' expects on/off");
}

}  // namespace

PipelineConfig parse_run_config(std::istream& in) {
  PipelineConfig config;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidConfig("config line " + std::to_string(line_no) + ": expected key = value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const auto trim = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t\r"));
      s.erase(s.find_last_not_of(" \t\r") + 1);
    };
    trim(key);
    trim(value);
    try {
      if (key == "levels") config.levels = std::stoi(value);
      else if (key == "scale") config.scale = std::stoi(value);
      else if (key == "max_disparity") config.max_disparity = std::stoi(value);
      else if (key == "feature_channels") config.feature_channels = std::stoi(value);
      else if (key == "alpha") config.alpha = value == "auto" ? 0.0 : std::stod(value);
      else if (key == "sigma_v") config.sigma_v = std::stod(value);
      else if (key == "tau_lrc") config.tau_lrc = std::stod(value);
      else if (key == "refine_radius") config.refine_radius = std::stoi(value);
      else if (key == "agg_radius") config.aggregation_radius = std::stoi(value);
      else if (key == "rematch_min_gap") config.rematch_min_gap = std::stod(value);
      else if (key == "condition_c") config.condition_constant = std::stod(value);
      else if (key == "refine") config.refinement = parse_switch(value, key);
      else if (key == "guidance") config.guidance = parse_switch(value, key);
      else if (key == "bidirectional") config.bidirectional = parse_switch(value, key);
      else if (key == "fusion") {
        if (value == "soft") config.fusion = FusionMode::kSoft;
        else if (value == "hard") config.fusion = FusionMode::kHard;
        else if (value == "off") config.fusion = FusionMode::kOff;
        else throw InvalidConfig("config key 'fusion' expects soft/hard/off");
      } else {
        throw InvalidConfig("config line " + std::to_string(line_no) + ": unknown key '" + key +
                            "'");
      }
    } catch (const std::invalid_argument&) {
      throw InvalidConfig("config line " + std::to_string(line_no) + ": bad value for '" + key +
                          "'");
    } catch (const std::out_of_range&) {
      throw InvalidConfig("config line " + std::to_string(line_no) + ": value out of range");
    }
  }
  config.validate();
  return config;
}

PipelineConfig parse_run_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config: " + path);
  return parse_run_config(in);
}

}  // namespace stereodecomp

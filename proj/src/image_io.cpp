#include "stereodecomp/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace stereodecomp {

namespace {

constexpr bool kHostLittleEndian = std::endian::native == std::endian::little;

class Reader {
 public:
  explicit Reader(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) throw FormatError("cannot open " + path, 0);
  }

  int get() {
    const int c = in_.get();
    if (c != EOF) ++offset_;
    return c;
  }

  // Skips whitespace and '#' comments, then reads a non-negative integer.
  long long ascii_int(const char* what) {
    skip_space_and_comments();
    long long value = 0;
    bool any = false;
    int c;
    while ((c = in_.peek()) != EOF && c >= '0' && c <= '9') {
      value = value * 10 + (c - '0');
      get();
      any = true;
      if (value > std::numeric_limits<int>::max())
        throw FormatError(std::string(what) + " out of range", offset_);
    }
    if (!any) throw FormatError(std::string("expected ") + what, offset_);
    return value;
  }

  void skip_space_and_comments() {
    int c;
    while ((c = in_.peek()) != EOF) {
      if (c == '#') {
        while ((c = in_.peek()) != EOF && c != '\n') get();
      } else if (std::isspace(c)) {
        get();
      } else {
        break;
      }
    }
  }

  // Exactly one whitespace byte separates the header from the payload.
  void one_space(const char* what) {
    const int c = get();
    if (c == EOF || !std::isspace(c)) throw FormatError(std::string(what), offset_);
  }

  void read_bytes(char* dst, std::size_t n, const char* what) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n)
      throw FormatError(std::string(what) + " truncated", offset_ + in_.gcount());
    offset_ += n;
  }

  std::string line() {
    std::string out;
    int c;
    while ((c = get()) != EOF && c != '\n') out.push_back(static_cast<char>(c));
    return out;
  }

  std::size_t offset() const { return offset_; }

 private:
  std::ifstream in_;
  std::size_t offset_ = 0;
};

}  // namespace

Grid read_pgm(const std::string& path) {
  Reader r(path);
  if (r.get() != 'P' || r.get() != '5') throw FormatError("not a binary PGM (P5)", 0);
  const int width = static_cast<int>(r.ascii_int("width"));
  const int height = static_cast<int>(r.ascii_int("height"));
  const long long maxval = r.ascii_int("maxval");
  if (width < 1 || height < 1) throw FormatError("bad PGM dimensions", r.offset());
  if (maxval < 1 || maxval > 65535) throw FormatError("unsupported PGM maxval", r.offset());
  r.one_space("missing separator after maxval");

  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<char> payload(static_cast<std::size_t>(width) * height * bytes);
  r.read_bytes(payload.data(), payload.size(), "PGM payload");

  Grid out(1, height, width);
  const double inv = 1.0 / static_cast<double>(maxval);
  std::size_t pos = 0;
  for (int row = 0; row < height; ++row)
    for (int col = 0; col < width; ++col) {
      unsigned v = static_cast<unsigned char>(payload[pos++]);
      if (bytes == 2) v = (v << 8) | static_cast<unsigned char>(payload[pos++]);
      out.at(0, row, col) = v * inv;
    }
  return out;
}

void write_pgm(const std::string& path, const Grid& image, int maxval) {
  if (image.channels != 1) throw InvalidInput("PGM writer expects a single channel");
  if (maxval != 255 && maxval != 65535) throw InvalidInput("maxval must be 255 or 65535");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path + " for writing", 0);
  out << "P5\n" << image.width << ' ' << image.height << '\n' << maxval << '\n';
  for (int row = 0; row < image.height; ++row)
    for (int col = 0; col < image.width; ++col) {
      const double clamped = std::clamp(image.at(0, row, col), 0.0, 1.0);
      const unsigned v = static_cast<unsigned>(std::lround(clamped * maxval));
      if (maxval > 255) out.put(static_cast<char>((v >> 8) & 0xff));
      out.put(static_cast<char>(v & 0xff));
    }
  if (!out) throw FormatError("short write to " + path, 0);
}

void write_mask_pgm(const std::string& path, const BoolMask& mask) {
  Grid g(1, mask.height, mask.width);
  for (int r = 0; r < mask.height; ++r)
    for (int c = 0; c < mask.width; ++c) g.at(0, r, c) = mask.at(r, c) ? 1.0 : 0.0;
  write_pgm(path, g, 255);
}

DisparityMap read_pfm(const std::string& path) {
  Reader r(path);
  const int m0 = r.get(), m1 = r.get();
  if (m0 != 'P' || m1 != 'f') throw FormatError("not a grayscale PFM (Pf)", 0);
  const int width = static_cast<int>(r.ascii_int("width"));
  const int height = static_cast<int>(r.ascii_int("height"));
  if (width < 1 || height < 1) throw FormatError("bad PFM dimensions", r.offset());
  r.skip_space_and_comments();
  const std::size_t scale_offset = r.offset();
  const std::string scale_line = r.line();
  double scale = 0.0;
  try {
    std::size_t used = 0;
    scale = std::stod(scale_line, &used);
    while (used < scale_line.size() && std::isspace(static_cast<unsigned char>(scale_line[used])))
      ++used;
    if (used != scale_line.size()) throw std::invalid_argument("trailing junk");
  } catch (const std::exception&) {
    throw FormatError("bad PFM scale line", scale_offset);
  }
  if (scale == 0.0) throw FormatError("PFM scale must be nonzero", scale_offset);
  const bool file_little = scale < 0.0;

  std::vector<char> payload(static_cast<std::size_t>(width) * height * 4);
  r.read_bytes(payload.data(), payload.size(), "PFM payload");

  DisparityMap out(height, width);
  std::size_t pos = 0;
  for (int row = height - 1; row >= 0; --row)  // bottom-to-top storage
    for (int col = 0; col < width; ++col) {
      char bytes[4];
      std::memcpy(bytes, payload.data() + pos, 4);
      pos += 4;
      if (file_little != kHostLittleEndian) std::swap(bytes[0], bytes[3]), std::swap(bytes[1], bytes[2]);
      float v;
      std::memcpy(&v, bytes, 4);
      out.at(row, col) = v;
      out.valid.set(row, col, std::isfinite(v));
    }
  return out;
}

void write_pfm(const std::string& path, const DisparityMap& map, bool little_endian) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path + " for writing", 0);
  out << "Pf\n" << map.width() << ' ' << map.height() << '\n'
      << (little_endian ? "-1.0" : "1.0") << '\n';
  for (int row = map.height() - 1; row >= 0; --row)
    for (int col = 0; col < map.width(); ++col) {
      const float v = map.valid.at(row, col)
                          ? static_cast<float>(map.at(row, col))
                          : std::numeric_limits<float>::infinity();
      char bytes[4];
      std::memcpy(bytes, &v, 4);
      if (little_endian != kHostLittleEndian) std::swap(bytes[0], bytes[3]), std::swap(bytes[1], bytes[2]);
      out.write(bytes, 4);
    }
  if (!out) throw FormatError("short write to " + path, 0);
}

}  // namespace stereodecomp

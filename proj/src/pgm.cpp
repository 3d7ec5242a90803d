#include "slads/pgm.hpp"

#include <cctype>
#include <fstream>
#include <iterator>

#include "slads/error.hpp"

namespace slads {

namespace {

using Kind = ParseError::Kind;

class HeaderReader {
public:
    explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t pos() const noexcept { return pos_; }

    void skip_whitespace_and_comments() {
        while (pos_ < bytes_.size()) {
            const auto c = bytes_[pos_];
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
            } else if (std::isspace(c)) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    long read_number(const char* what) {
        skip_whitespace_and_comments();
        const std::size_t start = pos_;
        long value = 0;
        while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 1'000'000'000L)
                throw ParseError(Kind::malformed_header, start, std::string(what) + " is too large");
            ++pos_;
        }
        if (pos_ == start)
            throw ParseError(Kind::malformed_header, start, std::string("expected ") + what);
        return value;
    }

    /// Exactly one whitespace byte separates the header from the raster.
    void single_whitespace() {
        if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_]))
            throw ParseError(Kind::malformed_header, pos_, "expected whitespace after maxval");
        ++pos_;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

Graymap parse_pgm(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
        throw ParseError(Kind::malformed_header, 0, "missing P5 magic");
    HeaderReader reader(bytes.subspan(2));
    const long width = reader.read_number("width");
    const long height = reader.read_number("height");
    const std::size_t maxval_offset = reader.pos() + 2;
    const long maxval = reader.read_number("maxval");
    if (width <= 0 || height <= 0)
        throw ParseError(Kind::malformed_header, 2, "width and height must be positive");
    if (maxval > 255)
        throw ParseError(Kind::unsupported_depth, maxval_offset,
                         "unsupported bit depth: maxval " + std::to_string(maxval) + " (only 8-bit supported)");
    if (maxval == 0) throw ParseError(Kind::malformed_header, maxval_offset, "maxval must be positive");
    reader.single_whitespace();

    const std::size_t data_offset = reader.pos() + 2;
    Graymap g;
    g.dims = {static_cast<int>(width), static_cast<int>(height)};
    g.maxval = static_cast<int>(maxval);
    const std::size_t expected = g.dims.size();
    const std::size_t available = bytes.size() - data_offset;
    if (available < expected)
        throw ParseError(Kind::truncated_payload, bytes.size(),
                         "truncated payload: expected " + std::to_string(expected) + " bytes, found " +
                             std::to_string(available));
    g.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(data_offset),
                    bytes.begin() + static_cast<std::ptrdiff_t>(data_offset + expected));
    return g;
}

std::vector<std::uint8_t> encode_pgm(Dims dims, std::span<const std::uint8_t> pixels) {
    if (pixels.size() != dims.size()) throw DimensionError("pixel count does not match dimensions");
    const std::string header =
        "P5\n" + std::to_string(dims.width) + " " + std::to_string(dims.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), pixels.begin(), pixels.end());
    return out;
}

GroundTruthImage load_image(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    Graymap g = parse_pgm(bytes);
    std::vector<double> values(g.pixels.begin(), g.pixels.end());
    return GroundTruthImage(g.dims, std::move(values));
}

void write_pgm(const std::filesystem::path& path, Dims dims, std::span<const std::uint8_t> pixels) {
    write_file_atomic(path, encode_pgm(dims, pixels));
}

void write_pgm(const std::filesystem::path& path, const ImageGrid& image) {
    write_pgm(path, image.dims(), quantize(image));
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace slads

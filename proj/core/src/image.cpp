#include "asitu/image.hpp"

#include <fstream>
#include <stdexcept>

namespace asitu {

namespace {

// Reads one header token, skipping whitespace and '#' comment lines.
std::string next_token(std::istream& in, const std::filesystem::path& path) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (tok.empty())
    throw std::runtime_error("malformed PGM header: " + path.string());
  return tok;
}

int header_int(std::istream& in, const std::filesystem::path& path) {
  const std::string tok = next_token(in, path);
  try {
    std::size_t pos = 0;
    const int v = std::stoi(tok, &pos);
    if (pos != tok.size() || v < 0) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("malformed PGM header token '" + tok + "': " +
                             path.string());
  }
}

}  // namespace

Image read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open PGM file: " + path.string());

  if (next_token(in, path) != "P5")
    throw std::runtime_error("not a binary PGM (P5) file: " + path.string());
  const int w = header_int(in, path);
  const int h = header_int(in, path);
  const int maxval = header_int(in, path);
  if (w <= 0 || h <= 0)
    throw std::runtime_error("malformed PGM dimensions: " + path.string());
  if (maxval <= 0 || maxval > 255)
    throw std::runtime_error("unsupported PGM maxval (expected <= 255): " +
                             path.string());

  Image img(w, h);
  in.read(reinterpret_cast<char*>(img.pixels.data()),
          static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
    throw std::runtime_error("truncated PGM pixel data: " + path.string());
  return img;
}

void write_pgm(const std::filesystem::path& path, const Image& img) {
  if (img.width <= 0 || img.height <= 0)
    throw std::invalid_argument("write_pgm: empty image");
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot open PGM file for writing: " +
                             path.string());
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw std::runtime_error("failed writing PGM: " + path.string());
}

}  // namespace asitu

#include <array>
#include <charconv>
#include <sstream>
#include <string_view>

#include "crslip/errors.hpp"
#include "crslip/mesh.hpp"

namespace crslip {

namespace {

void append_double(std::string& out, double v) {
  std::array<char, 32> buf;
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), ptr);
}

// Yields non-empty, comment-stripped lines together with their 1-based
// line numbers.
class LineReader {
 public:
  explicit LineReader(const std::string& text) : in_(text) {}

  bool next(std::string& line, std::size_t& number) {
    std::string raw;
    while (std::getline(in_, raw)) {
      ++count_;
      if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
      if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
      line = raw;
      number = count_;
      return true;
    }
    return false;
  }
  std::size_t count() const { return count_; }

 private:
  std::istringstream in_;
  std::size_t count_ = 0;
};

std::size_t read_header(LineReader& reader, std::string_view keyword) {
  std::string line;
  std::size_t no = 0;
  if (!reader.next(line, no)) throw ParseError(reader.count() + 1, "expected '" + std::string(keyword) + "'");
  std::istringstream ls(line);
  std::string word;
  long long value = -1;
  std::string extra;
  if (!(ls >> word) || word != keyword || !(ls >> value) || value < 0 || (ls >> extra)) {
    throw ParseError(no, "expected '" + std::string(keyword) + " <count>'");
  }
  return static_cast<std::size_t>(value);
}

}  // namespace

std::string export_mesh(const SimplexMesh& mesh) {
  const int dim = mesh.dim();
  std::string out = "DIM " + std::to_string(dim) + "\n";
  out += "VERTICES " + std::to_string(mesh.num_vertices()) + "\n";
  for (const Point& p : mesh.vertices()) {
    for (int k = 0; k < dim; ++k) {
      if (k) out += ' ';
      append_double(out, p[k]);
    }
    out += '\n';
  }
  out += "CELLS " + std::to_string(mesh.num_cells()) + "\n";
  for (const Cell& c : mesh.cells()) {
    for (int k = 0; k <= dim; ++k) {
      if (k) out += ' ';
      out += std::to_string(c[k]);
    }
    out += '\n';
  }
  return out;
}

SimplexMesh import_mesh(const std::string& text) {
  LineReader reader(text);
  const std::size_t dim = read_header(reader, "DIM");
  if (dim != 2 && dim != 3) throw ParseError(reader.count(), "DIM must be 2 or 3");

  std::string line;
  std::size_t no = 0;
  const std::size_t nv = read_header(reader, "VERTICES");
  std::vector<Point> verts(nv, Point::Zero());
  for (std::size_t i = 0; i < nv; ++i) {
    if (!reader.next(line, no)) throw ParseError(reader.count() + 1, "missing vertex line");
    std::istringstream ls(line);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!(ls >> verts[i][k])) throw ParseError(no, "expected " + std::to_string(dim) + " coordinates");
    }
    std::string extra;
    if (ls >> extra) throw ParseError(no, "trailing data on vertex line");
  }

  const std::size_t nc = read_header(reader, "CELLS");
  std::vector<Cell> cells(nc, Cell{-1, -1, -1, -1});
  bool repaired = false;
  for (std::size_t c = 0; c < nc; ++c) {
    if (!reader.next(line, no)) throw ParseError(reader.count() + 1, "missing cell line");
    std::istringstream ls(line);
    std::array<Point, 4> p;
    for (std::size_t k = 0; k <= dim; ++k) {
      long long idx = -1;
      if (!(ls >> idx)) throw ParseError(no, "expected " + std::to_string(dim + 1) + " vertex indices");
      if (idx < 0 || static_cast<std::size_t>(idx) >= nv) throw ParseError(no, "vertex index out of range");
      cells[c][k] = static_cast<int>(idx);
      p[k] = verts[idx];
    }
    std::string extra;
    if (ls >> extra) throw ParseError(no, "trailing data on cell line");
    const double vol = signed_volume(static_cast<int>(dim), std::span<const Point>(p.data(), dim + 1));
    if (vol == 0.0) throw ParseError(no, "degenerate cell");
    if (vol < 0.0) {
      std::swap(cells[c][0], cells[c][1]);
      repaired = true;
    }
  }
  if (reader.next(line, no)) throw ParseError(no, "unexpected trailing content");

  SimplexMesh mesh(static_cast<int>(dim), std::move(verts), std::move(cells));
  mesh.set_orientation_repaired(repaired);
  return mesh;
}

}  // namespace crslip

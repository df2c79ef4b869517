#pragma once

// Field dump format: a single-line JSON header describing the grid and
// bidegree, a newline, then the raw coefficient payload as little-endian
// f64 pairs (re, im), planes in lex-bitmask coefficient order, points
// row-major over the axes x1,y1,...,xn,yn.

#include <fstream>
#include <string>

#include "gauduchon/form_field.hpp"

namespace gauduchon {

inline void write_field_dump(const std::string& path, const FormField& F) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw config_error("write_field_dump: cannot open " + path);
  const TorusGrid& g = F.grid();
  out << "{\"n\":" << g.n << ",\"N\":" << g.N << ",\"p\":" << F.p()
      << ",\"q\":" << F.q() << ",\"coeff_order\":\"lex-bitmask\","
      << "\"layout\":\"row-major axes x1,y1,...,xn,yn\","
      << "\"scalar\":\"f64le interleaved re,im\"}\n";
  long total = F.ncoeff() * F.npoints();
  for (long i = 0; i < total; ++i) {
    double re = F.data()[i].real(), im = F.data()[i].imag();
    out.write(reinterpret_cast<const char*>(&re), 8);
    out.write(reinterpret_cast<const char*>(&im), 8);
  }
  if (!out) throw config_error("write_field_dump: write failed for " + path);
}

namespace detail {

inline int header_int(const std::string& h, const std::string& key) {
  auto pos = h.find("\"" + key + "\":");
  if (pos == std::string::npos)
    throw config_error("read_field_dump: header missing key " + key);
  return std::stoi(h.substr(pos + key.size() + 3));
}

}  // namespace detail

inline FormField read_field_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("read_field_dump: cannot open " + path);
  std::string header;
  std::getline(in, header);
  TorusGrid g(detail::header_int(header, "n"), detail::header_int(header, "N"));
  FormField F(g, detail::header_int(header, "p"),
              detail::header_int(header, "q"));
  long total = F.ncoeff() * F.npoints();
  for (long i = 0; i < total; ++i) {
    double re = 0.0, im = 0.0;
    in.read(reinterpret_cast<char*>(&re), 8);
    in.read(reinterpret_cast<char*>(&im), 8);
    F.data()[i] = cplx(re, im);
  }
  if (!in) throw config_error("read_field_dump: truncated payload in " + path);
  return F;
}

}  // namespace gauduchon

#pragma once

// Thin FFTW wrapper: cached unnormalized c2c plans of rank 2n over the torus
// grid.  backward() applies the 1/M normalization so backward(forward(x)) = x.

#include <fftw3.h>

#include <map>
#include <vector>

#include "gauduchon/grid.hpp"
#include "gauduchon/point_form.hpp"

namespace gauduchon {

class Fft {
 public:
  static Fft& instance() {
    static Fft f;
    return f;
  }

  void forward(const TorusGrid& g, cplx* data) { exec(g, data, FFTW_FORWARD); }
  void backward(const TorusGrid& g, cplx* data) {
    exec(g, data, FFTW_BACKWARD);
    double s = 1.0 / double(g.npoints());
    long m = g.npoints();
    for (long i = 0; i < m; ++i) data[i] *= s;
  }

 private:
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;

  fftw_plan plan(const TorusGrid& g, int sign) {
    auto key = std::make_tuple(g.n, g.N, sign);
    auto it = plans_.find(key);
    if (it == plans_.end()) {
      std::vector<int> dims(g.axes(), g.N);
      std::vector<cplx> buf(g.npoints());
      fftw_plan p = fftw_plan_dft(
          g.axes(), dims.data(), reinterpret_cast<fftw_complex*>(buf.data()),
          reinterpret_cast<fftw_complex*>(buf.data()), sign,
          FFTW_ESTIMATE | FFTW_UNALIGNED);
      it = plans_.emplace(key, p).first;
    }
    return it->second;
  }

  void exec(const TorusGrid& g, cplx* data, int sign) {
    fftw_plan p = plan(g, sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
  }
};

}  // namespace gauduchon

#pragma once

#include <complex>

// Thin FFTW wrappers. Plans are cached per size; execution goes through the
// new-array interface so concurrent calls on distinct buffers are fine.
namespace nlsw::fft {

using cplx = std::complex<double>;

// out has n/2+1 entries. Unnormalized.
void r2c(const double* in, cplx* out, int n);
// in has n/2+1 entries and is not modified. Unnormalized (result is n * inverse).
void c2r(const cplx* in, double* out, int n);
// in and out must not alias.
void forward(const cplx* in, cplx* out, int n);
void backward(const cplx* in, cplx* out, int n);

// Extended precision pair for long time stepping, where the bias of double
// twiddle factors accumulates over many round trips.
using lcplx = std::complex<long double>;
void forward(const lcplx* in, lcplx* out, int n);
void backward(const lcplx* in, lcplx* out, int n);

} // namespace nlsw::fft

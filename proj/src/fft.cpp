#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace nlsw::fft {

namespace {

enum class Kind { r2c, c2r, fwd, bwd };

std::mutex planner_mutex;

fftw_plan plan_for(Kind kind, int n)
{
    static std::map<std::pair<Kind, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(planner_mutex);
    auto it = cache.find({kind, n});
    if (it != cache.end())
        return it->second;

    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    double* r = fftw_alloc_real(n);
    fftw_complex* c = fftw_alloc_complex(n);
    fftw_complex* c2 = fftw_alloc_complex(n);
    fftw_plan p = nullptr;
    switch (kind) {
    case Kind::r2c: p = fftw_plan_dft_r2c_1d(n, r, c, flags); break;
    case Kind::c2r: p = fftw_plan_dft_c2r_1d(n, c, r, flags); break;
    case Kind::fwd: p = fftw_plan_dft_1d(n, c, c2, FFTW_FORWARD, flags); break;
    case Kind::bwd: p = fftw_plan_dft_1d(n, c, c2, FFTW_BACKWARD, flags); break;
    }
    fftw_free(r);
    fftw_free(c);
    fftw_free(c2);
    cache.emplace(std::make_pair(kind, n), p);
    return p;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

fftwl_plan plan_for_long(Kind kind, int n)
{
    static std::map<std::pair<Kind, int>, fftwl_plan> cache;
    std::lock_guard<std::mutex> lock(planner_mutex);
    auto it = cache.find({kind, n});
    if (it != cache.end())
        return it->second;
    fftwl_complex* c = fftwl_alloc_complex(n);
    fftwl_complex* c2 = fftwl_alloc_complex(n);
    fftwl_plan p = fftwl_plan_dft_1d(n, c, c2, kind == Kind::fwd ? FFTW_FORWARD : FFTW_BACKWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftwl_free(c);
    fftwl_free(c2);
    cache.emplace(std::make_pair(kind, n), p);
    return p;
}

fftwl_complex* as_fftw(lcplx* p) { return reinterpret_cast<fftwl_complex*>(p); }

} // namespace

void r2c(const double* in, cplx* out, int n)
{
    // r2c plans leave the input alone, but the API is not const-correct
    fftw_execute_dft_r2c(plan_for(Kind::r2c, n), const_cast<double*>(in), as_fftw(out));
}

void c2r(const cplx* in, double* out, int n)
{
    std::vector<cplx> scratch(in, in + n / 2 + 1);
    fftw_execute_dft_c2r(plan_for(Kind::c2r, n), as_fftw(scratch.data()), out);
}

void forward(const cplx* in, cplx* out, int n)
{
    fftw_execute_dft(plan_for(Kind::fwd, n), as_fftw(const_cast<cplx*>(in)), as_fftw(out));
}

void backward(const cplx* in, cplx* out, int n)
{
    fftw_execute_dft(plan_for(Kind::bwd, n), as_fftw(const_cast<cplx*>(in)), as_fftw(out));
}

} // namespace nlsw::fft

namespace nlsw::fft {

void forward(const lcplx* in, lcplx* out, int n)
{
    fftwl_execute_dft(plan_for_long(Kind::fwd, n), as_fftw(const_cast<lcplx*>(in)), as_fftw(out));
}

void backward(const lcplx* in, lcplx* out, int n)
{
    fftwl_execute_dft(plan_for_long(Kind::bwd, n), as_fftw(const_cast<lcplx*>(in)), as_fftw(out));
}

} // namespace nlsw::fft

#pragma once

#include <memory>

#include "mnls/grid.hpp"

namespace mnls {

// complex-to-complex FFT workspace on an n-dimensional cube lattice
class FftBox {
  public:
    FftBox(int dim, int points_per_axis);
    ~FftBox();
    FftBox(const FftBox&) = delete;
    FftBox& operator=(const FftBox&) = delete;

    int dim() const { return n_; }
    int m() const { return m_; }
    std::int64_t size() const { return size_; }

    cplx* data() { return buf_; }
    const cplx* data() const { return buf_; }
    void forward();   // unnormalized
    void backward();  // unnormalized; forward+backward = size() * id

    // axis index of flat position f along axis k (own flattening: axis 0 fastest)
    int axis_index(std::int64_t f, int k) const {
        std::int64_t s = 1;
        for (int i = 0; i < k; ++i) s *= m_;
        return static_cast<int>((f / s) % m_);
    }
    // signed frequency integer in [-m/2, m/2)
    int folded(int idx) const { return idx < m_ / 2 ? idx : idx - m_; }

  private:
    int n_, m_;
    std::int64_t size_;
    cplx* buf_;
    void* plan_fwd_;
    void* plan_bwd_;
};

// homogeneous Sobolev norm of the zero extension: || |xi|^s u^ ||, with the
// box-periodic DFT frequencies xi = (pi / box) * k
double sobolev_norm(const Grid& g, const Field& u, double s);

// squared norm || |D|^{p/2} rho ||_{L2}^2 of a real lattice density; pad > 1
// zero-extends the box by that factor so the periodic spectrum approximates
// the free-space one (needed for slowly decaying multipliers)
double spectrum_weighted_norm2(const Grid& g, const RealField& rho, double p, int pad = 1);

// spectral (FFT) gradient squared L2 norm of the zero extension
double spectral_gradient_norm2(const Grid& g, const Field& u);

// periodic free drift: u <- exp(i |xi|^2 tau) u (the a=I, b=c=0 flow)
void free_drift(const Grid& g, Field& u, double tau, FftBox& box);

// pairwise interaction integral sum_{x,y} rho(x) K(x-y) rho(y) h^{2n} with
// K(z) = |z|^{-p}; the zero-offset entry is the analytic cell average of K.
// Implemented as a zero-padded (linear) FFT convolution.
class InteractionKernel {
  public:
    InteractionKernel(const Grid& g, double p = 3.0);
    double evaluate(const RealField& rho);
    // direct O(N^2) reference with byte-identical kernel table
    double evaluate_direct(const RealField& rho, bool include_self = true) const;
    double near_cell_average() const { return k_center_; }

  private:
    const Grid* grid_;
    double p_;
    double k_center_;
    std::unique_ptr<FftBox> box_;          // padded (2M)^n workspace
    std::vector<cplx> kernel_hat_;
};

// analytic cell average of |z|^{-p} over the cell [-h/2, h/2]^n
double kernel_cell_average(int n, double h, double p);

}  // namespace mnls

#ifndef BIOBENCH_MMSE_HPP
#define BIOBENCH_MMSE_HPP

namespace biobench::enhance {

/// First exponential integral E1(x) = int_x^inf e^-t / t dt, x > 0.
double expint_e1(double x);

/// Exponentially scaled modified Bessel functions e^-x I0(x), e^-x I1(x).
/// Stable for arbitrarily large x (asymptotic branch above x = 20).
double bessel_i0_scaled(double x);
double bessel_i1_scaled(double x);

/// Short-time spectral amplitude MMSE gain as a function of the a-priori
/// SNR xi and the a-posteriori SNR gamma (both linear, > 0). Unclamped.
double stsa_gain(double xi, double gamma);

/// Log-spectral amplitude MMSE gain, same parameterization. Unclamped.
double lsa_gain(double xi, double gamma);

}  // namespace biobench::enhance

#endif  // BIOBENCH_MMSE_HPP

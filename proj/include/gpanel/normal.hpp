#pragma once

namespace gpanel {

// Standard normal quantile, Wichura's algorithm AS 241 (PPND16).
// Rational approximations on three regimes; absolute error below 1e-9
// everywhere on (0,1) (the published bound is about 1e-16).
// Throws UsageError for p outside (0,1).
double normal_quantile(double p);

// Standard normal CDF via erfc; used as the independent check on the
// quantile and for p-value style diagnostics.
double normal_cdf(double z);

}  // namespace gpanel

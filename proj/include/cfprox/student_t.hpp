// Copyright 2026 The cfprox Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

namespace cfprox {

// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction,
// accurate to ~1e-14 absolute for a, b > 0 and x in [0, 1]. Throws
// NumericalError on bad arguments or non-convergence.
double regularized_incomplete_beta(double a, double b, double x);

// P(T <= t) for Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

// P(T > t), computed without cancellation for large t.
double student_t_upper_tail(double t, double df);

}  // namespace cfprox

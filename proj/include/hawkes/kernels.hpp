#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hawkes {

enum class Family { Exp, Pwl, Sqr, Sns };

inline constexpr Family kAllFamilies[] = {Family::Exp, Family::Pwl, Family::Sqr, Family::Sns};

std::string_view family_name(Family family);
Family parse_family(std::string_view name);

// alpha * exp(-beta t)
struct ExpKernel {
    double alpha;
    double beta;
};

// k / (c + t)^p, p > 1
struct PwlKernel {
    double k;
    double c;
    double p;
};

// b on [0, l]
struct SqrKernel {
    double b;
    double l;
};

// a * sin(omega t) on [0, pi / omega]
struct SnsKernel {
    double a;
    double omega;
};

using BaseKernel = std::variant<ExpKernel, PwlKernel, SqrKernel, SnsKernel>;

struct Single {
    BaseKernel kernel;
};
struct Sum {
    BaseKernel left;
    BaseKernel right;
};
struct Product {
    BaseKernel left;
    BaseKernel right;
};

// One base kernel or a single binary composition of two.
using CompositeKernel = std::variant<Single, Sum, Product>;

Family family_of(const BaseKernel& kernel);

// Parameter vector in declaration order (alpha,beta | k,c,p | b,l | a,omega).
std::vector<double> parameters(const BaseKernel& kernel);
BaseKernel make_kernel(Family family, std::span<const double> params);
std::size_t parameter_count(Family family);

// Throws InvalidInput when a parameter is non-positive, non-finite, or p <= 1.
void validate(const BaseKernel& kernel);
void validate(const CompositeKernel& kernel);

// End of the support; +inf for EXP and PWL.
double support_end(const BaseKernel& kernel);
double support_end(const CompositeKernel& kernel);

double evaluate(const BaseKernel& kernel, double t);
double evaluate(const CompositeKernel& kernel, double t);

// sup of phi(s) over s >= elapsed. Dominates the kernel from `elapsed` onwards.
double sup_from(const BaseKernel& kernel, double elapsed);
double sup_from(const CompositeKernel& kernel, double elapsed);

std::string describe(const BaseKernel& kernel);
std::string describe(const CompositeKernel& kernel);

// ---------------------------------------------------------------------------
// Stationarity

struct StationarityVerdict {
    double norm_value = 0.0;  // ||phi|| or its closed-form upper bound
    bool is_bound = false;
    bool stationary = false;  // 0 <= norm_value < 1
};

struct StationarityOptions {
    // Relative endpoint mismatch allowed for SQR x SNS and SNS x SNS products.
    double support_tolerance = 0.05;
    // Accept bound rows whose bound is >= 1 when the quadrature norm is < 1.
    bool quadrature_fallback = false;
};

double base_norm(const BaseKernel& kernel);

StationarityVerdict stationarity_norm(const CompositeKernel& kernel,
                                      const StationarityOptions& options = {});

// e^x * Gamma(a, x) for any real a and x > 0.
double scaled_upper_gamma(double a, double x);

// ---------------------------------------------------------------------------
// Higher-order products

enum class ReductionKind {
    Exact,         // EXP^k, SQR^k
    LowerBound,    // PWL^k
    NotReducible,  // SNS^k, only the amplitude is meaningful
};

struct IntraclassReduction {
    BaseKernel kernel;
    ReductionKind kind;
};

// Reduces a same-family product. A single factor is returned unchanged as Exact.
IntraclassReduction reduce_intraclass_product(std::span<const BaseKernel> factors);

// Dominating function for [EXP]^k1 x [PWL]^k2 x [SQR]^k3 x [SNS]^k4:
//   amplitude * exp(-beta x) / (x + c)^p on [0, support_end], 0 elsewhere.
// Missing families contribute a factor of one.
struct ProductUpperBound {
    double amplitude = 1.0;
    double beta = 0.0;
    std::optional<double> c;  // present when PWL factors exist
    double p = 0.0;
    double support_end;

    double evaluate(double x) const;
    std::string describe() const;
};

// `factors` may hold any mix of families; at least one factor is required.
ProductUpperBound interclass_product_upper_bound(std::span<const BaseKernel> factors);

}  // namespace hawkes

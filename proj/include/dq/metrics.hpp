#pragma once

#include "dq/lci.hpp"

namespace dq {

/// Exact rational in lowest terms, with a fixed 4-place decimal rendering so
/// reports never depend on floating-point formatting.
struct Rational {
    long long num = 0;
    long long den = 1;

    static Rational of(long long num, long long den);
    std::string decimal4() const;
    bool operator==(const Rational&) const = default;
};

struct PerRelationQuality {
    size_t size = 0;
    size_t quality_size = 0;
    size_t symmetric_difference = 0;
};

struct MetricReport {
    size_t qm0 = 0;
    Rational qm1;
    Rational jaccard_r;
    Rational qm2;
    std::map<std::string, PerRelationQuality> per_relation;
};

/// Σ_R |R(D) △ R_quality| over the relations of `d`.
size_t qm0(const Instance& d, const Instance& quality);

/// (|D| - max_i |Dq_i|) / |D|. Quality instances must be contained in d.
Rational qm1(const Instance& d, const std::vector<Instance>& quality_instances);

/// |∩_i Dq_i| / |D|.
Rational jaccard_r(const Instance& d, const std::vector<Instance>& quality_instances);

/// |D \ ∪_R certain-answers(Q_R)| / |D| with Q_R(x̄) ← R(x̄) per source
/// relation, answered through the minimal legal contextual instance.
Rational qm2(const Instance& d, const LciSpec& spec, ExternalRegistry* registry = nullptr);

MetricReport compute_metrics(const Instance& d, const Instance& quality, const LciSpec& spec,
                             ExternalRegistry* registry = nullptr);

}  // namespace dq

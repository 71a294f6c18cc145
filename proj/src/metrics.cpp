#include "dq/metrics.hpp"

#include <numeric>

namespace dq {

Rational Rational::of(long long num, long long den) {
    if (den == 0) throw Error(ErrorCode::EmptyBase, "zero denominator");
    long long g = std::gcd(num, den);
    if (g == 0) g = 1;
    return Rational{num / g, den / g};
}

std::string Rational::decimal4() const {
    long long scaled = (num * 10000 + den / 2) / den;  // round half up
    std::string digits = std::to_string(scaled);
    if (digits.size() < 5) digits.insert(0, 5 - digits.size(), '0');
    digits.insert(digits.size() - 4, 1, '.');
    return digits;
}

size_t qm0(const Instance& d, const Instance& quality) {
    size_t total = 0;
    for (const auto& [name, rel] : d.relations()) {
        if (quality.find(name))
            total += symmetric_difference(d, quality, name);
        else
            total += rel.size();
    }
    return total;
}

namespace {

void require_nonempty(const Instance& d) {
    if (d.total_size() == 0)
        throw Error(ErrorCode::EmptyBase, "the instance under assessment is empty");
}

}  // namespace

Rational qm1(const Instance& d, const std::vector<Instance>& quality_instances) {
    require_nonempty(d);
    if (quality_instances.empty())
        throw Error(ErrorCode::EmptyBase, "no quality instances supplied");
    size_t best = 0;
    for (const auto& q : quality_instances) {
        if (!instance_contained(q, d))
            throw Error(ErrorCode::ContainmentViolation,
                        "a quality instance is not contained in the instance under assessment");
        best = std::max(best, q.total_size());
    }
    return Rational::of(static_cast<long long>(d.total_size() - best),
                        static_cast<long long>(d.total_size()));
}

Rational jaccard_r(const Instance& d, const std::vector<Instance>& quality_instances) {
    require_nonempty(d);
    if (quality_instances.empty())
        throw Error(ErrorCode::EmptyBase, "no quality instances supplied");
    size_t common = 0;
    for (const auto& [name, rel] : quality_instances.front().relations()) {
        for (const auto& t : rel) {
            bool everywhere = true;
            for (size_t i = 1; i < quality_instances.size() && everywhere; ++i) {
                const Relation* other = quality_instances[i].find(name);
                everywhere = other && other->contains(t);
            }
            if (everywhere) ++common;
        }
    }
    return Rational::of(static_cast<long long>(common), static_cast<long long>(d.total_size()));
}

Rational qm2(const Instance& d, const LciSpec& spec, ExternalRegistry* registry) {
    require_nonempty(d);
    Instance i_min = minimal_lci(spec, d, registry);
    size_t kept = 0;
    for (const auto& sig : spec.system.sourceSchema) {
        const Relation* rel = d.find(sig.name);
        if (!rel) continue;
        auto qn = spec.system.quality_nickname_of(sig.name);
        if (!qn)
            throw Error(ErrorCode::MissingViewDefinition,
                        "no quality view for source relation " + sig.name);
        const Relation* answers = i_min.find(*qn);
        for (const auto& t : *rel)
            if (answers && answers->contains(t)) ++kept;
    }
    return Rational::of(static_cast<long long>(d.total_size() - kept),
                        static_cast<long long>(d.total_size()));
}

MetricReport compute_metrics(const Instance& d, const Instance& quality, const LciSpec& spec,
                             ExternalRegistry* registry) {
    MetricReport report;
    report.qm0 = qm0(d, quality);
    report.qm1 = qm1(d, {quality});
    report.jaccard_r = jaccard_r(d, {quality});
    report.qm2 = qm2(d, spec, registry);
    for (const auto& [name, rel] : d.relations()) {
        PerRelationQuality pr;
        pr.size = rel.size();
        const Relation* q = quality.find(name);
        pr.quality_size = q ? q->size() : 0;
        pr.symmetric_difference = q ? symmetric_difference(d, quality, name) : rel.size();
        report.per_relation[name] = pr;
    }
    return report;
}

}  // namespace dq

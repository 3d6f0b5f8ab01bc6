#include "dcfl/data/blobs.hpp"

#include "dcfl/errors.hpp"

#include <cmath>
#include <numbers>

namespace dcfl::data {

namespace {

constexpr double kDomainRotationDeg = 15.0;

// Gram-Schmidt on Gaussian draws.
std::vector<std::vector<double>> random_orthonormal(int count, int dim, numkit::RngStream& rng) {
    std::vector<std::vector<double>> basis;
    while (static_cast<int>(basis.size()) < count) {
        std::vector<double> v(static_cast<std::size_t>(dim));
        for (double& x : v) x = rng.normal();
        for (const auto& b : basis) {
            double dot = 0.0;
            for (int i = 0; i < dim; ++i) dot += v[i] * b[i];
            for (int i = 0; i < dim; ++i) v[i] -= dot * b[i];
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm < 1e-8) continue;
        for (double& x : v) x /= norm;
        basis.push_back(std::move(v));
    }
    return basis;
}

} // namespace

double blob_sigma(const BlobSpec& spec) {
    const double min_distance = spec.num_classes <= spec.d_feat
                                    ? std::numbers::sqrt2
                                    : 2.0 * std::sin(std::numbers::pi / spec.num_classes);
    return min_distance / spec.class_separation;
}

std::vector<std::vector<double>> blob_centers(const BlobSpec& spec, numkit::RngStream& rng) {
    const int c = spec.num_classes;
    const int d = spec.d_feat;
    if (c <= d) return random_orthonormal(c, d, rng);

    // Unit circle in a random 2-plane. Even labels take the first half-turn
    // and odd labels the second, so labels 2i and 2i+1 sit opposite.
    const auto plane = random_orthonormal(2, d, rng);
    const int half = (c + 1) / 2;
    std::vector<std::vector<double>> centers;
    for (int k = 0; k < c; ++k) {
        const int slot = k / 2 + (k % 2) * half;
        const double angle = 2.0 * std::numbers::pi * slot / c;
        std::vector<double> center(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) center[i] = std::cos(angle) * plane[0][i] + std::sin(angle) * plane[1][i];
        centers.push_back(std::move(center));
    }
    return centers;
}

void apply_domain_transform(std::vector<double>& point, int domain, double strength) {
    if (domain == 0 || point.size() < 2) return;
    const double angle = kDomainRotationDeg * domain * std::numbers::pi / 180.0;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double x = point[0];
    const double y = point[1];
    point[0] = c * x - s * y;
    point[1] = s * x + c * y;
    const double shift = strength * domain / std::sqrt(static_cast<double>(point.size()));
    for (double& v : point) v += shift;
}

Dataset make_blobs(const BlobSpec& spec, numkit::RngStream& rng) {
    if (spec.num_classes < 2) throw DomainError("make_blobs: num_classes must be >= 2");
    if (spec.num_domains < 1) throw DomainError("make_blobs: num_domains must be >= 1");
    if (spec.d_feat < 2) throw DomainError("make_blobs: d_feat must be >= 2");
    if (spec.samples_per_class_per_domain < 0) throw DomainError("make_blobs: negative sample count");
    if (!(spec.class_separation > 0.0)) throw DomainError("make_blobs: class_separation must be > 0");
    if (spec.domain_transform_strength < 0.0) throw DomainError("make_blobs: negative transform strength");

    auto center_rng = rng.split(0);
    auto sample_rng = rng.split(1);
    const auto centers = blob_centers(spec, center_rng);
    const double sigma = blob_sigma(spec);

    Dataset out(spec.num_classes, spec.num_domains, spec.d_feat);
    for (int dom = 0; dom < spec.num_domains; ++dom) {
        for (int cls = 0; cls < spec.num_classes; ++cls) {
            for (int i = 0; i < spec.samples_per_class_per_domain; ++i) {
                Example ex;
                ex.label = cls;
                ex.domain = dom;
                ex.features = centers[cls];
                for (double& v : ex.features) v += sigma * sample_rng.normal();
                apply_domain_transform(ex.features, dom, spec.domain_transform_strength);
                out.add(std::move(ex));
            }
        }
    }
    return out;
}

} // namespace dcfl::data

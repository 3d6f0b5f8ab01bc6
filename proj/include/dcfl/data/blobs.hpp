#pragma once

#include "dcfl/data/dataset.hpp"
#include "dcfl/numkit/rng.hpp"

#include <vector>

namespace dcfl::data {

struct BlobSpec {
    int num_classes = 10;
    int num_domains = 1;
    int samples_per_class_per_domain = 100;
    int d_feat = 2;
    double class_separation = 4.0;
    double domain_transform_strength = 0.0;
};

/// Unit-norm class centers, one row per class.
///
/// With num_classes <= d_feat the centers are random orthonormal directions.
/// Otherwise they are evenly spaced on the unit circle of a random 2-plane,
/// with labels 2i and 2i+1 placed opposite each other.
std::vector<std::vector<double>> blob_centers(const BlobSpec& spec, numkit::RngStream& rng);

/// Per-class noise scale: nearest-center distance / class_separation.
double blob_sigma(const BlobSpec& spec);

/// Applies the fixed affine map of domain `domain` in place: rotation by
/// 15 degrees * domain in the first two coordinates, then a shift of
/// strength * domain along the all-ones direction.
void apply_domain_transform(std::vector<double>& point, int domain, double strength);

/// Gaussian blobs. Layout is domain-major, then class, then sample.
Dataset make_blobs(const BlobSpec& spec, numkit::RngStream& rng);

} // namespace dcfl::data

#include "dcfl/data/blobs.hpp"
#include "dcfl/data/dataset.hpp"
#include "dcfl/data/idx.hpp"
#include "dcfl/data/partition.hpp"
#include "dcfl/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <algorithm>
#include <map>
#include <numbers>
#include <numeric>
#include <tuple>
#include <set>
#include <string>
#include <vector>

using namespace dcfl;
using data::Dataset;
using data::Example;
using numkit::RngStream;

namespace {

Dataset labelled(int classes, int domains, int per_stratum) {
    Dataset ds(classes, domains, 2);
    for (int d = 0; d < domains; ++d)
        for (int c = 0; c < classes; ++c)
            for (int i = 0; i < per_stratum; ++i) ds.add({{double(c), double(i)}, c, d});
    return ds;
}

std::set<int> labels_of(const Dataset& ds, const std::vector<std::size_t>& idx) {
    std::set<int> out;
    for (auto i : idx) out.insert(ds[i].label);
    return out;
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::vector<std::uint8_t> idx_images(std::uint32_t n, std::uint32_t rows, std::uint32_t cols,
                                     const std::vector<std::uint8_t>& pixels) {
    std::vector<std::uint8_t> out;
    put_be32(out, 0x00000803);
    put_be32(out, n);
    put_be32(out, rows);
    put_be32(out, cols);
    out.insert(out.end(), pixels.begin(), pixels.end());
    return out;
}

std::vector<std::uint8_t> idx_labels(const std::vector<std::uint8_t>& labels) {
    std::vector<std::uint8_t> out;
    put_be32(out, 0x00000801);
    put_be32(out, static_cast<std::uint32_t>(labels.size()));
    out.insert(out.end(), labels.begin(), labels.end());
    return out;
}

std::string format_error_message(const std::vector<std::uint8_t>& images, const std::vector<std::uint8_t>& labels) {
    try {
        data::parse_idx(images, labels);
    } catch (const FormatError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_SUITE("dataset") {
    TEST_CASE("add validates the example") {
        Dataset ds(3, 2, 2);
        CHECK_NOTHROW(ds.add({{0.0, 1.0}, 2, 1}));
        CHECK_THROWS(ds.add({{0.0}, 0, 0}));
        CHECK_THROWS(ds.add({{0.0, 1.0}, 3, 0}));
        CHECK_THROWS(ds.add({{0.0, 1.0}, 0, 2}));
        CHECK(ds.size() == 1);
    }

    TEST_CASE("subset keeps metadata and order") {
        const auto ds = labelled(3, 1, 4);
        const std::vector<std::size_t> idx{5, 1, 9};
        const auto sub = ds.subset(idx);
        CHECK(sub.size() == 3);
        CHECK(sub.num_classes() == 3);
        CHECK(sub[0] == ds[5]);
        CHECK(sub[2] == ds[9]);
    }
}

TEST_SUITE("blobs") {
    TEST_CASE("sample means sit near unit-norm centers") {
        const data::BlobSpec spec{10, 1, 2000, 2, 4.0, 0.0};
        RngStream rng(11);
        const auto ds = data::make_blobs(spec, rng);
        auto center_rng = rng.split(0);
        const auto centers = data::blob_centers(spec, center_rng);
        const double sigma = data::blob_sigma(spec);
        const double tol = 3.0 * sigma / std::sqrt(2000.0);

        std::vector<std::vector<double>> sums(10, std::vector<double>(2, 0.0));
        for (const auto& ex : ds) {
            sums[ex.label][0] += ex.features[0];
            sums[ex.label][1] += ex.features[1];
        }
        for (int c = 0; c < 10; ++c) {
            CHECK(std::hypot(centers[c][0], centers[c][1]) == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::abs(sums[c][0] / 2000 - centers[c][0]) < tol);
            CHECK(std::abs(sums[c][1] / 2000 - centers[c][1]) < tol);
        }
    }

    TEST_CASE("per-class spread equals sigma") {
        const data::BlobSpec spec{4, 1, 5000, 3, 3.0, 0.0};
        RngStream rng(12);
        const auto ds = data::make_blobs(spec, rng);
        auto center_rng = rng.split(0);
        const auto centers = data::blob_centers(spec, center_rng);
        double sq = 0.0;
        for (const auto& ex : ds)
            for (int j = 0; j < 3; ++j) sq += std::pow(ex.features[j] - centers[ex.label][j], 2);
        const double var = sq / (ds.size() * 3.0);
        CHECK(std::sqrt(var) == doctest::Approx(data::blob_sigma(spec)).epsilon(0.02));
    }

    TEST_CASE("orthonormal centers when classes fit the dimension") {
        const data::BlobSpec spec{3, 1, 1, 5, 4.0, 0.0};
        RngStream rng(13);
        const auto c = data::blob_centers(spec, rng);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double dot = 0.0;
                for (int k = 0; k < 5; ++k) dot += c[i][k] * c[j][k];
                CHECK(dot == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
            }
        CHECK(data::blob_sigma(spec) == doctest::Approx(std::sqrt(2.0) / 4.0));
    }

    TEST_CASE("ring layout puts paired labels opposite") {
        const data::BlobSpec spec{10, 1, 1, 2, 4.0, 0.0};
        RngStream rng(14);
        const auto c = data::blob_centers(spec, rng);
        for (int i = 0; i < 10; i += 2) {
            CHECK(c[i][0] == doctest::Approx(-c[i + 1][0]));
            CHECK(c[i][1] == doctest::Approx(-c[i + 1][1]));
        }
        double min_dist = 1e9;
        for (int i = 0; i < 10; ++i)
            for (int j = i + 1; j < 10; ++j) min_dist = std::min(min_dist, std::hypot(c[i][0] - c[j][0], c[i][1] - c[j][1]));
        CHECK(min_dist == doctest::Approx(2.0 * std::sin(std::numbers::pi / 10)));
        CHECK(data::blob_sigma(spec) == doctest::Approx(min_dist / 4.0));
    }

    TEST_CASE("zero samples gives an empty dataset with metadata") {
        RngStream rng(15);
        const auto ds = data::make_blobs({5, 2, 0, 3, 4.0, 1.0}, rng);
        CHECK(ds.size() == 0);
        CHECK(ds.num_classes() == 5);
        CHECK(ds.num_domains() == 2);
        CHECK(ds.d_feat() == 3);
    }

    TEST_CASE("deterministic") {
        RngStream a(16);
        RngStream b(16);
        const data::BlobSpec spec{4, 3, 20, 2, 4.0, 1.0};
        CHECK(data::make_blobs(spec, a) == data::make_blobs(spec, b));
    }

    TEST_CASE("domain transform is rotation then shift") {
        std::vector<double> p{1.0, 0.0};
        data::apply_domain_transform(p, 2, 0.5);
        const double a = 30.0 * std::numbers::pi / 180.0;
        const double shift = 0.5 * 2 / std::sqrt(2.0);
        CHECK(p[0] == doctest::Approx(std::cos(a) + shift));
        CHECK(p[1] == doctest::Approx(std::sin(a) + shift));

        std::vector<double> q{0.3, -0.2, 0.7};
        data::apply_domain_transform(q, 0, 5.0);
        CHECK(q == std::vector<double>{0.3, -0.2, 0.7});
    }

    TEST_CASE("domain means move with the transform") {
        const data::BlobSpec spec{2, 3, 3000, 2, 4.0, 1.0};
        RngStream rng(17);
        const auto ds = data::make_blobs(spec, rng);
        auto center_rng = rng.split(0);
        const auto centers = data::blob_centers(spec, center_rng);
        for (int d = 0; d < 3; ++d) {
            auto want = centers[1];
            data::apply_domain_transform(want, d, 1.0);
            double mx = 0.0, my = 0.0;
            int n = 0;
            for (const auto& ex : ds) {
                if (ex.label != 1 || ex.domain != d) continue;
                mx += ex.features[0];
                my += ex.features[1];
                ++n;
            }
            CHECK(n == 3000);
            CHECK(std::abs(mx / n - want[0]) < 0.02);
            CHECK(std::abs(my / n - want[1]) < 0.02);
        }
    }

    TEST_CASE("invalid arguments") {
        RngStream rng(18);
        CHECK_THROWS_AS(data::make_blobs({1, 1, 10, 2, 4.0, 0.0}, rng), DomainError);
        CHECK_THROWS_AS(data::make_blobs({3, 1, 10, 1, 4.0, 0.0}, rng), DomainError);
        CHECK_THROWS_AS(data::make_blobs({3, 1, 10, 2, 0.0, 0.0}, rng), DomainError);
        CHECK_THROWS_AS(data::make_blobs({3, 0, 10, 2, 4.0, 0.0}, rng), DomainError);
    }
}

TEST_SUITE("idx") {
    TEST_CASE("one white image labelled 3") {
        const auto images = idx_images(1, 2, 2, {255, 255, 255, 255});
        const auto labels = idx_labels({3});
        const auto ds = data::parse_idx(images, labels);
        REQUIRE(ds.size() == 1);
        CHECK(ds.num_classes() == 10);
        CHECK(ds.num_domains() == 1);
        CHECK(ds[0].label == 3);
        CHECK(ds[0].domain == 0);
        CHECK(ds[0].features == std::vector<double>(4, 1.0));
    }

    TEST_CASE("pixel scaling and row-major order") {
        const auto ds = data::parse_idx(idx_images(2, 1, 2, {0, 51, 102, 255}), idx_labels({0, 9}));
        CHECK(ds[0].features == std::vector<double>{0.0, 0.2});
        CHECK(ds[1].features == std::vector<double>{0.4, 1.0});
        CHECK(ds[1].label == 9);
    }

    TEST_CASE("round trip through files") {
        const auto dir = std::filesystem::temp_directory_path() / "dcfl_idx_test";
        std::filesystem::create_directories(dir);
        const auto images = idx_images(1, 2, 2, {255, 0, 0, 255});
        const auto labels = idx_labels({7});
        std::ofstream(dir / "img", std::ios::binary).write(reinterpret_cast<const char*>(images.data()), images.size());
        std::ofstream(dir / "lab", std::ios::binary).write(reinterpret_cast<const char*>(labels.data()), labels.size());
        const auto ds = data::load_idx(dir / "img", dir / "lab");
        CHECK(ds[0].label == 7);
        CHECK(ds[0].features == std::vector<double>{1.0, 0.0, 0.0, 1.0});
        CHECK_THROWS_AS(data::load_idx(dir / "missing", dir / "lab"), FormatError);
        std::filesystem::remove_all(dir);
    }

    TEST_CASE("errors name the offending field") {
        const auto good_images = idx_images(1, 2, 2, {1, 2, 3, 4});
        const auto good_labels = idx_labels({1});

        CHECK(format_error_message(good_images, idx_labels({1, 2})).find("count") != std::string::npos);
        CHECK(format_error_message({}, good_labels).find("images") != std::string::npos);
        CHECK(format_error_message(good_images, {}).find("labels") != std::string::npos);

        auto bad_magic = good_images;
        bad_magic[3] = 0x01;
        CHECK(format_error_message(bad_magic, good_labels).find("images.magic") != std::string::npos);
        auto bad_label_magic = good_labels;
        bad_label_magic[3] = 0x03;
        CHECK(format_error_message(good_images, bad_label_magic).find("labels.magic") != std::string::npos);

        auto truncated = good_images;
        truncated.pop_back();
        CHECK(format_error_message(truncated, good_labels).find("images.data") != std::string::npos);

        const std::vector<std::uint8_t> short_header{0, 0, 8};
        CHECK_FALSE(format_error_message(short_header, good_labels).empty());

        CHECK(format_error_message(good_images, idx_labels({12})).find("labels.data") != std::string::npos);
    }

    TEST_CASE("average pooling") {
        Dataset one(10, 1, 4);
        one.add({{1, 1, 3, 3}, 2, 0});
        const auto pooled = data::downsample_avgpool(one, 2, 1);
        CHECK(pooled.d_feat() == 1);
        CHECK(pooled[0].features == std::vector<double>{2.0});
        CHECK(pooled[0].label == 2);

        CHECK(data::downsample_avgpool(one, 2, 2) == one);

        Dataset constant(10, 1, 16);
        constant.add({std::vector<double>(16, 0.25), 5, 0});
        CHECK(data::downsample_avgpool(constant, 4, 2)[0].features == std::vector<double>(4, 0.25));

        // 4x4 -> 2x2 with distinct quadrants.
        Dataset quad(10, 1, 16);
        quad.add({{1, 1, 2, 2, 1, 1, 2, 2, 3, 3, 4, 4, 3, 3, 4, 4}, 0, 0});
        CHECK(data::downsample_avgpool(quad, 4, 2)[0].features == std::vector<double>{1, 2, 3, 4});

        CHECK_THROWS_AS(data::downsample_avgpool(constant, 4, 3), DomainError);
        CHECK_THROWS_AS(data::downsample_avgpool(constant, 3, 1), DomainError);
    }
}

TEST_SUITE("partition") {
    TEST_CASE("class-incremental IID session class sets") {
        const auto ds = labelled(10, 1, 40);
        RngStream rng(20);
        const auto s = data::partition_class_inc_iid(ds, 4, 5, 2, rng);
        for (int k = 0; k < 4; ++k)
            for (int sess = 0; sess < 5; ++sess) {
                const std::set<int> want{2 * sess, 2 * sess + 1};
                CHECK(labels_of(ds, s.indices(k, sess)) == want);
                CHECK(s.indices(k, sess).size() == 20);
            }
        CHECK(data::partition_violations(s, ds, 2).empty());
    }

    TEST_CASE("reference scale: 6000 per class over 20 clients") {
        Dataset ds(10, 1, 1);
        for (int c = 0; c < 10; ++c)
            for (int i = 0; i < 6000; ++i) ds.add({{0.0}, c, 0});
        RngStream rng(21);
        const auto s = data::partition_class_inc_iid(ds, 20, 5, 2, rng);
        for (int k = 0; k < 20; ++k) {
            std::map<int, int> per_class;
            for (auto i : s.indices(k, 0)) ++per_class[ds[i].label];
            CHECK(per_class == std::map<int, int>{{0, 300}, {1, 300}});
        }
    }

    TEST_CASE("single client holds every retained sample once") {
        const auto ds = labelled(6, 1, 7);
        RngStream rng(22);
        const auto s = data::partition_class_inc_iid(ds, 1, 3, 2, rng);
        std::vector<std::size_t> all;
        for (int sess = 0; sess < 3; ++sess) all.insert(all.end(), s.indices(0, sess).begin(), s.indices(0, sess).end());
        std::sort(all.begin(), all.end());
        std::vector<std::size_t> want(ds.size());
        std::iota(want.begin(), want.end(), 0);
        CHECK(all == want);
    }

    TEST_CASE("truncation keeps shares equal") {
        const auto ds = labelled(4, 1, 11);
        RngStream rng(23);
        const auto s = data::partition_class_inc_iid(ds, 3, 2, 2, rng);
        for (int k = 0; k < 3; ++k) CHECK(s.indices(k, 0).size() == 6);
        CHECK(data::partition_violations(s, ds, 2).empty());
    }

    TEST_CASE("non-IID shifted class sets") {
        const auto ds = labelled(10, 1, 50);
        RngStream rng(24);
        const auto s = data::partition_class_inc_noniid(ds, 5, 5, 2, rng);
        std::set<int> union0;
        for (int k = 0; k < 5; ++k) {
            const std::set<int> want{2 * k, 2 * k + 1};
            CHECK(labels_of(ds, s.indices(k, 0)) == want);
            for (int c : want) union0.insert(c);
            std::set<int> across;
            for (int sess = 0; sess < 5; ++sess) {
                const auto l = labels_of(ds, s.indices(k, sess));
                CHECK(l.size() == 2);
                for (int c : l) CHECK(across.insert(c).second);
            }
        }
        CHECK(union0.size() == 10);
        // Cyclic shift: client 1 goes {2,3} -> {4,5}.
        CHECK(labels_of(ds, s.indices(1, 1)) == std::set<int>{4, 5});
        CHECK(data::partition_violations(s, ds, 2).empty());
    }

    TEST_CASE("non-IID client 0 follows the IID order") {
        const auto ds = labelled(10, 1, 50);
        RngStream a(25);
        RngStream b(25);
        const auto iid = data::partition_class_inc_iid(ds, 5, 5, 2, a);
        const auto non = data::partition_class_inc_noniid(ds, 5, 5, 2, b);
        for (int sess = 0; sess < 5; ++sess) CHECK(iid.class_sets[0][sess] == non.class_sets[0][sess]);
    }

    TEST_CASE("domain-incremental") {
        const auto ds = labelled(3, 4, 12);
        RngStream rng(26);
        const auto s = data::partition_domain_inc(ds, 3, rng);
        CHECK(s.num_sessions == 4);
        CHECK(s.session_domain == std::vector<int>{0, 1, 2, 3});
        std::vector<int> seen(ds.size(), 0);
        for (int k = 0; k < 3; ++k)
            for (int sess = 0; sess < 4; ++sess) {
                CHECK(labels_of(ds, s.indices(k, sess)) == std::set<int>{0, 1, 2});
                for (auto i : s.indices(k, sess)) {
                    CHECK(ds[i].domain == sess);
                    ++seen[i];
                }
            }
        for (int v : seen) CHECK(v == 1);
        CHECK(data::partition_violations(s, ds, 1).empty());
    }

    TEST_CASE("domain order is configurable") {
        const auto ds = labelled(2, 3, 4);
        RngStream rng(27);
        const auto s = data::partition_domain_inc(ds, 2, rng, {2, 0, 1});
        for (auto i : s.indices(1, 0)) CHECK(ds[i].domain == 2);
        for (auto i : s.indices(1, 2)) CHECK(ds[i].domain == 1);
        CHECK_THROWS_AS(data::partition_domain_inc(ds, 2, rng, {0, 0, 1}), DomainError);
    }

    TEST_CASE("preconditions") {
        const auto ds = labelled(4, 1, 3);
        RngStream rng(28);
        CHECK_THROWS_AS(data::partition_class_inc_iid(ds, 2, 3, 2, rng), DomainError);
        CHECK_THROWS_AS(data::partition_class_inc_iid(ds, 5, 2, 2, rng), DomainError);
        CHECK_THROWS_AS(data::partition_class_inc_noniid(ds, 2, 5, 1, rng), DomainError);
        CHECK_THROWS_AS(data::partition_domain_inc(ds, 2, rng), DomainError);
    }

    TEST_CASE("deterministic and seed dependent") {
        const auto ds = labelled(6, 1, 30);
        RngStream a(29);
        RngStream b(29);
        RngStream c(30);
        const auto s1 = data::partition_class_inc_iid(ds, 3, 3, 2, a);
        const auto s2 = data::partition_class_inc_iid(ds, 3, 3, 2, b);
        const auto s3 = data::partition_class_inc_iid(ds, 3, 3, 2, c);
        CHECK(s1.assignment == s2.assignment);
        CHECK(s1.assignment != s3.assignment);
    }

    TEST_CASE("violation checker flags broken schedules") {
        const auto ds = labelled(4, 1, 10);
        RngStream rng(31);
        auto s = data::partition_class_inc_iid(ds, 2, 2, 2, rng);
        REQUIRE(data::partition_violations(s, ds, 2).empty());

        auto dup = s;
        dup.assignment[1][0].push_back(dup.assignment[0][0].front());
        std::sort(dup.assignment[1][0].begin(), dup.assignment[1][0].end());
        CHECK_FALSE(data::partition_violations(dup, ds, 2).empty());

        auto wrong_class = s;
        wrong_class.assignment[0][0].push_back(wrong_class.assignment[0][1].back());
        wrong_class.assignment[0][1].pop_back();
        CHECK_FALSE(data::partition_violations(wrong_class, ds, 2).empty());

        auto dropped = s;
        dropped.assignment[0][1].clear();
        CHECK_FALSE(data::partition_violations(dropped, ds, 2).empty());
    }

    TEST_CASE("rounds per session") {
        const auto ds = labelled(4, 1, 10);
        RngStream rng(32);
        const auto s = data::partition_class_inc_iid(ds, 2, 2, 2, rng, 20);
        CHECK(s.total_rounds() == 40);
        CHECK(s.session_of_round(19) == 0);
        CHECK(s.session_of_round(20) == 1);
    }
}

TEST_SUITE("train_test_split") {
    TEST_CASE("80/20 per class") {
        const auto ds = labelled(3, 1, 100);
        RngStream rng(40);
        const auto split = data::train_test_split(ds, 0.2, rng);
        std::map<int, int> train, test;
        for (const auto& ex : split.train) ++train[ex.label];
        for (const auto& ex : split.test) ++test[ex.label];
        for (int c = 0; c < 3; ++c) {
            CHECK(train[c] == 80);
            CHECK(test[c] == 20);
        }
    }

    TEST_CASE("partition of the input, deterministic") {
        const auto ds = labelled(3, 2, 9);
        RngStream a(41);
        RngStream b(41);
        const auto s1 = data::train_test_split(ds, 0.3, a);
        const auto s2 = data::train_test_split(ds, 0.3, b);
        CHECK(s1.train == s2.train);
        CHECK(s1.test == s2.test);
        CHECK(s1.train.size() + s1.test.size() == ds.size());
        // Features encode (class, index) and domains separate strata, so
        // each example is identified by (features, domain).
        std::multiset<std::tuple<double, double, int>> all, parts;
        for (const auto& ex : ds) all.insert({ex.features[0], ex.features[1], ex.domain});
        for (const auto& ex : s1.train) parts.insert({ex.features[0], ex.features[1], ex.domain});
        for (const auto& ex : s1.test) parts.insert({ex.features[0], ex.features[1], ex.domain});
        CHECK(all == parts);
    }

    TEST_CASE("errors") {
        const auto ds = labelled(2, 1, 1);
        RngStream rng(42);
        CHECK_THROWS_AS(data::train_test_split(ds, 0.5, rng), DomainError);
        CHECK_THROWS_AS(data::train_test_split(labelled(2, 1, 4), 0.0, rng), DomainError);
        CHECK_THROWS_AS(data::train_test_split(labelled(2, 1, 4), 1.0, rng), DomainError);
    }
}

#include "doctest.h"

#include <random>

#include "seqspec/arveson.hpp"
#include "seqspec/toeplitz.hpp"

#include "oracles.hpp"

using namespace seqspec;

namespace {

MatrixSequence tridiag_sections() {
    // shared instance so tests reuse the cached eigenvalues
    static MatrixSequence seq = [] {
        StructuredToeplitzSequence s;
        s.symbol = Symbol::from_coeffs({{-1, 1.0}, {1, 1.0}});
        return assemble(s);
    }();
    return seq;
}

MatrixSequence alternating() { return alternate(identity_sequence(), zero_sequence()); }

// random Hermitian sequence with small dimensions, deterministic per seed
MatrixSequence random_selfadjoint(std::uint64_t seed, std::size_t dim_cap = 8) {
    return MatrixSequence(
        DimensionFunction::custom([dim_cap](std::size_t n) { return std::min(n, dim_cap); }),
        [seed, dim_cap](std::size_t n) {
            std::mt19937_64 rng(seed * 2654435761u + n);
            return oracle::random_hermitian(rng, std::min(n, dim_cap));
        },
        true, "randherm");
}

} // namespace

TEST_SUITE("eig_counts") {
    TEST_CASE("examples") {
        auto ci = eig_counts(identity_sequence(), 1.0, 0.5, 6);
        CHECK(ci[5] == 6);
        auto cz = eig_counts(zero_sequence(), 1.0, 0.5, 8);
        for (auto c : cz) CHECK(c == 0);
        auto ct = eig_counts(tridiag_sections(), 0.0, 1.0, 4);
        CHECK(ct[3] == 2); // eigenvalues +-0.618, +-1.618: exactly two inside (-1, 1)
    }

    TEST_CASE("counts match the closed-form oracle for tridiagonal sections") {
        auto seq = tridiag_sections();
        for (double lambda : {0.0, 0.75, -1.5, 2.0}) {
            for (double eps : {0.4, 0.1}) {
                auto counts = eig_counts(seq, lambda, eps, 48);
                for (std::size_t n = 1; n <= 48; ++n) {
                    const auto oracle_count =
                        oracle::count_in(oracle::tridiag_eigs(n), lambda - eps, lambda + eps);
                    CHECK(counts[n - 1] == oracle_count);
                }
            }
        }
    }

    TEST_CASE("non-self-adjoint input is rejected") {
        StructuredToeplitzSequence s;
        s.symbol = Symbol::from_coeffs({{1, 1.0}});
        CHECK_THROWS_AS(eig_counts(assemble(s), 0.0, 0.5, 8), ContractError);
    }

    TEST_CASE("counts are monotone in the interval width") {
        std::mt19937_64 rng(71);
        std::uniform_real_distribution<double> lam(-2.0, 2.0);
        for (int rep = 0; rep < 20; ++rep) {
            auto seq = random_selfadjoint(400 + rep);
            const double lambda = lam(rng);
            auto narrow = eig_counts(seq, lambda, 0.15, 24);
            auto wide = eig_counts(seq, lambda, 0.6, 24);
            for (std::size_t n = 0; n < 24; ++n) CHECK(narrow[n] <= wide[n]);
        }
    }
}

TEST_SUITE("classify_point") {
    TEST_CASE("tridiagonal sections: essential inside, transient outside") {
        auto seq = tridiag_sections();
        auto mid = classify_point(seq, 0.0, default_eps_ladder(), 256);
        CHECK(mid.verdict == PointVerdict::Essential);

        auto outside = classify_point(seq, 3.0, default_eps_ladder(), 256);
        CHECK(outside.verdict == PointVerdict::Transient);
        CHECK(outside.bound == 0);
        CHECK(outside.eps == doctest::Approx(0.4));
    }

    TEST_CASE("alternating sequence stays undecided at 0") {
        auto c = classify_point(alternating(), 0.0, default_eps_ladder(), 256);
        CHECK(c.verdict == PointVerdict::Undecided);
    }

    TEST_CASE("ladder validation") {
        CHECK_THROWS_AS(classify_point(alternating(), 0.0, {}, 64), ContractError);
        CHECK_THROWS_AS(classify_point(alternating(), 0.0, {0.1, 0.2}, 64), ContractError);
    }
}

TEST_SUITE("essential spectrum estimate") {
    TEST_CASE("identity sequence concentrates at 1") {
        auto est = essential_spectrum_estimate(identity_sequence(), {0.0, 0.5, 1.0},
                                               default_eps_ladder(), 128);
        REQUIRE(est.non_transient.size() == 1);
        CHECK(est.non_transient[0] == doctest::Approx(1.0));
        CHECK(est.bounded_sanity_ok);
    }

    TEST_CASE("tridiagonal sections fill [-2, 2]") {
        auto seq = tridiag_sections();
        auto est = essential_spectrum_estimate(seq, {-3.0, -1.0, 0.0, 1.0, 3.0},
                                               default_eps_ladder(), 256);
        REQUIRE(est.non_transient.size() == 3);
        CHECK(est.non_transient[0] == doctest::Approx(-1.0));
        CHECK(est.non_transient[1] == doctest::Approx(0.0));
        CHECK(est.non_transient[2] == doctest::Approx(1.0));
    }

    TEST_CASE("alternating sequence keeps both candidates") {
        auto est = essential_spectrum_estimate(alternating(), {0.0, 1.0},
                                               default_eps_ladder(), 128);
        CHECK(est.non_transient.size() == 2);
    }
}

TEST_SUITE("cross_check_fredholm") {
    TEST_CASE("tridiagonal sections at distance from the spectrum") {
        auto rep = cross_check_fredholm(tridiag_sections(), 3.0, 256, 1e-3);
        CHECK(rep.outcome == CrossCheckOutcome::AgreeTransient);
        CHECK(rep.fredholm.k == 0);
        CHECK(rep.fredholm.floor == doctest::Approx(1.0).epsilon(0.01));
    }

    TEST_CASE("tridiagonal sections inside the spectrum") {
        auto rep = cross_check_fredholm(tridiag_sections(), 0.0, 256, 1e-3);
        CHECK(rep.outcome == CrossCheckOutcome::AgreeEssentialish);
        CHECK(rep.fredholm.kind != FredholmVerdict::Kind::Fredholm);
    }

    TEST_CASE("identity at 0 agrees transient") {
        auto rep = cross_check_fredholm(identity_sequence(), 0.0, 128, 1e-3);
        CHECK(rep.outcome == CrossCheckOutcome::AgreeTransient);
    }
}

TEST_SUITE("dichotomy audit") {
    TEST_CASE("tridiagonal sections decide every point") {
        auto rep = dichotomy_audit(tridiag_sections(), {-3.0, -1.0, 0.0, 1.0, 3.0},
                                   default_eps_ladder(), 256);
        CHECK(rep.dichotomy);
        CHECK(rep.undecided.empty());
        CHECK(rep.essential.size() == 3);
        CHECK(rep.transient.size() == 2);
        CHECK(rep.bounded_sanity_ok);
    }

    TEST_CASE("alternating sequence fails, its even restriction passes") {
        auto alt = alternating();
        auto full = dichotomy_audit(alt, {0.0, 0.5, 1.0}, default_eps_ladder(), 128);
        CHECK_FALSE(full.dichotomy);
        REQUIRE(full.undecided.size() == 2);
        CHECK(full.undecided[0] == doctest::Approx(0.0));
        CHECK(full.undecided[1] == doctest::Approx(1.0));

        auto even = restrict_to(alt, Restriction::arithmetic(2, 2));
        auto sub = dichotomy_audit(even, {0.0, 0.5, 1.0}, default_eps_ladder(), 64);
        CHECK(sub.dichotomy);
        REQUIRE(sub.essential.size() == 1);
        CHECK(sub.essential[0] == doctest::Approx(0.0));
        CHECK(sub.transient.size() == 2);
    }
}

TEST_SUITE("strong limit spectra") {
    TEST_CASE("symbol range points are essential for perturbed section sequences") {
        // the strong limit of these sections is T(a) + K; its essential
        // spectrum is the range of a = 2cos, untouched by the rank-1 block
        StructuredToeplitzSequence s;
        s.symbol = Symbol::from_coeffs({{-1, 1.0}, {1, 1.0}});
        s.k_block = Matrix{{0.7}};
        s.k_rank = 1;
        auto seq = assemble(s);
        const std::vector<double> coarse = {0.4, 0.2};
        auto inside = classify_point(seq, 0.5, coarse, 128);
        CHECK(inside.verdict == PointVerdict::Essential);
        auto edge = classify_point(seq, -1.5, coarse, 128);
        CHECK(edge.verdict == PointVerdict::Essential);
        auto outside = classify_point(seq, 3.0, coarse, 128);
        CHECK(outside.verdict == PointVerdict::Transient);
    }
}

TEST_SUITE("arveson invariants") {
    TEST_CASE("transient and essential persist to subsequences") {
        auto seq = tridiag_sections();
        std::mt19937_64 rng(81);
        std::uniform_int_distribution<std::size_t> strides(2, 4), starts(1, 5);
        for (int rep = 0; rep < 6; ++rep) {
            auto eta = Restriction::arithmetic(starts(rng), strides(rng));
            auto sub = restrict_to(seq, eta);
            // transient at 3 on the full sequence: restriction must not be essential
            auto t = classify_point(sub, 3.0, default_eps_ladder(), 48);
            CHECK(t.verdict != PointVerdict::Essential);
            // essential at 0 on the full sequence: restriction must not be transient
            auto e = classify_point(sub, 0.0, default_eps_ladder(), 48);
            CHECK(e.verdict != PointVerdict::Transient);
        }
    }

    TEST_CASE("counts are invariant under unitary conjugation") {
        for (std::uint64_t seed : {11u, 12u, 13u}) {
            auto seq = random_selfadjoint(seed);
            auto conjugated = MatrixSequence(
                seq.dims(),
                [seq](std::size_t n) {
                    std::mt19937_64 rng(7777u * n + 5);
                    const Matrix h = oracle::random_hermitian(rng, seq.dim_at(n));
                    const Matrix u = hermitian_eig(h).basis;
                    return u.adjoint() * seq.eval(n) * u;
                },
                true, "conjugated");
            for (double lambda : {-0.5, 0.3}) {
                auto base = eig_counts(seq, lambda, 0.4, 20);
                auto conj = eig_counts(conjugated, lambda, 0.4, 20);
                CHECK(base == conj);
            }
        }
    }

    TEST_CASE("shifted singular values equal |eig - lambda| for self-adjoint input") {
        std::mt19937_64 rng(91);
        std::uniform_real_distribution<double> lam(-2.0, 2.0);
        for (int rep = 0; rep < 40; ++rep) {
            auto a = oracle::random_hermitian(rng, 2 + rep % 12);
            const double lambda = lam(rng);
            Matrix shifted = a - Matrix::identity(a.dim()) * cplx{lambda, 0.0};
            auto via_svd = svd_values(shifted);
            auto via_eig = singular_values_from_eigs(hermitian_eigenvalues(a), lambda);
            for (std::size_t k = 1; k <= a.dim(); ++k)
                CHECK(std::abs(via_svd.largest(k) - via_eig.largest(k)) <= 1e-8);
        }
    }

    TEST_CASE("shifted_profile equals the profile of the shifted sequence") {
        auto seq = tridiag_sections();
        const double lambda = 0.75;
        auto direct = shifted_profile(seq, lambda, 32, 4);
        auto via_combinators = singular_profile(
            add(seq, scale(identity_sequence(), cplx{-lambda, 0.0})), 32, 4);
        for (std::size_t n = 1; n <= 32; ++n)
            for (std::size_t k = 1; k <= std::min<std::size_t>(4, n); ++k) {
                CHECK(*direct.top(n, k) ==
                      doctest::Approx(*via_combinators.top(n, k)).epsilon(1e-9));
                CHECK(*direct.bottom(n, k) ==
                      doctest::Approx(*via_combinators.bottom(n, k)).epsilon(1e-9));
            }
    }
}

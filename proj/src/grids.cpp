#include "dpomdp/grids.hpp"

#include "dpomdp/simplex.hpp"

#include <algorithm>
#include <charconv>

namespace dpomdp {

GridScheme::GridScheme(std::vector<Belief> points, std::string pattern, std::optional<std::uint64_t> seed)
    : pattern_(std::move(pattern)), seed_(seed) {
    if (points.empty()) throw ValidationError("grid has no points");
    const Index dim = points.front().size();
    for (auto& p : points) {
        if (p.size() != dim) throw ValidationError("grid points have mixed dimensions");
        bool duplicate = false;
        for (const auto& kept : points_)
            if (kept.approx_equal(p)) {
                duplicate = true;
                break;
            }
        if (!duplicate) points_.push_back(std::move(p));
    }
    matrix_.resize(dim, size());
    for (Index i = 0; i < size(); ++i) matrix_.col(i) = points_[i].probs();
    vertex_index_.assign(dim, -1);
    for (Index s = 0; s < dim; ++s) {
        const Belief e = Belief::vertex(dim, s);
        if (auto at = find(e))
            vertex_index_[s] = *at;
        else
            throw ValidationError("grid is missing vertex " + std::to_string(s));
    }
}

std::optional<Index> GridScheme::find(const Belief& x) const {
    for (Index i = 0; i < size(); ++i)
        if (points_[i].approx_equal(x)) return i;
    return std::nullopt;
}

namespace {

std::vector<Belief> vertices(Index num_states) {
    std::vector<Belief> out;
    for (Index s = 0; s < num_states; ++s) out.push_back(Belief::vertex(num_states, s));
    return out;
}

}  // namespace

GridScheme make_edge_grid(Index num_states, int k) {
    if (k < 0) throw ValidationError("edge grid needs k >= 0");
    auto points = vertices(num_states);
    for (Index s = 0; s < num_states; ++s)
        for (Index t = s + 1; t < num_states; ++t)
            for (int j = 1; j <= k; ++j) {
                const double w = static_cast<double>(j) / (k + 1);
                Vector p = Vector::Zero(num_states);
                p(s) = 1.0 - w;
                p(t) = w;
                points.emplace_back(std::move(p));
            }
    return GridScheme(std::move(points), std::to_string(k) + "-E");
}

GridScheme make_random_grid(Index num_states, int n, std::uint64_t seed) {
    if (n < 0) throw ValidationError("random grid needs n >= 0");
    auto points = vertices(num_states);
    Rng rng = make_stream(seed, "random-grid");
    for (int i = 0; i < n; ++i) points.push_back(sample_uniform_belief(num_states, rng));
    return GridScheme(std::move(points), std::to_string(n) + "-R", seed);
}

GridScheme combine_grids(const GridScheme& a, const GridScheme& b) {
    if (a.dimension() != b.dimension()) throw ValidationError("cannot combine grids of different dimension");
    std::vector<Belief> points = a.points();
    points.insert(points.end(), b.points().begin(), b.points().end());
    std::string pattern = a.pattern() == b.pattern() ? a.pattern() : a.pattern() + "+" + b.pattern();
    return GridScheme(std::move(points), std::move(pattern), a.seed() ? a.seed() : b.seed());
}

GridScheme make_grid(std::string_view pattern, Index num_states, std::uint64_t seed) {
    std::optional<GridScheme> grid;
    int random_parts = 0;
    std::size_t begin = 0;
    while (begin <= pattern.size()) {
        std::size_t end = pattern.find('+', begin);
        if (end == std::string_view::npos) end = pattern.size();
        const std::string_view part = pattern.substr(begin, end - begin);
        const auto dash = part.find('-');
        int count = -1;
        if (dash != std::string_view::npos && dash + 2 == part.size()) {
            auto [ptr, ec] = std::from_chars(part.data(), part.data() + dash, count);
            if (ec != std::errc() || ptr != part.data() + dash) count = -1;
        }
        if (count < 0) throw ValidationError("bad grid pattern part '" + std::string(part) + "'");
        GridScheme next = [&] {
            switch (part.back()) {
                case 'E':
                    return make_edge_grid(num_states, count);
                case 'R': {
                    const std::uint64_t part_seed =
                        random_parts == 0 ? seed : derive_seed(seed, "grid-part", random_parts);
                    ++random_parts;
                    return make_random_grid(num_states, count, part_seed);
                }
                default:
                    throw ValidationError("grid pattern part must end in E or R: '" + std::string(part) + "'");
            }
        }();
        grid = grid ? combine_grids(*grid, next) : std::move(next);
        begin = end + 1;
    }
    return std::move(*grid);
}

ConvexWeights convex_coords(const GridScheme& grid, const Belief& x) {
    const Index dim = grid.dimension();
    const Index n = grid.size();
    if (x.size() != dim) throw ValidationError("belief dimension does not match grid");

    Vector distance(n);
    for (Index i = 0; i < n; ++i) distance(i) = l1_distance(grid.matrix().col(i), x.probs());

    std::vector<Index> basis(dim);
    for (Index s = 0; s < dim; ++s) basis[s] = grid.vertex_index(s);
    const LpSolution lp = solve_lp(grid.matrix(), x.probs(), distance, basis);
    if (lp.status != LpStatus::optimal)
        throw Error("convex_coords: interpolation LP failed although the vertices are present");

    // Recompute basic weights directly from the basis for accurate reconstruction.
    Matrix B(dim, dim);
    for (Index r = 0; r < dim; ++r) B.col(r) = grid.matrix().col(lp.basis[r]);
    Vector w = B.fullPivLu().solve(x.probs());

    std::vector<std::pair<Index, double>> support;
    for (Index r = 0; r < dim; ++r) {
        const double weight = w(r) < 1e-14 ? 0.0 : w(r);
        if (weight > 0.0) support.emplace_back(lp.basis[r], weight);
    }
    std::sort(support.begin(), support.end());
    double total = 0.0;
    for (auto& [i, weight] : support) total += weight;
    ConvexWeights out;
    for (auto& [i, weight] : support) {
        weight /= total;
        out.objective += weight * distance(i);
        out.radius = std::max(out.radius, distance(i));
    }
    out.support = std::move(support);
    return out;
}

double estimate_epsilon(const GridScheme& grid, const std::vector<Belief>& samples) {
    double eps = 0.0;
    for (const auto& x : samples) eps = std::max(eps, convex_coords(grid, x).radius);
    return eps;
}

double estimate_epsilon(const GridScheme& grid, Index samples, std::uint64_t seed) {
    if (samples < 1) throw ValidationError("estimate_epsilon needs at least one sample");
    Rng rng = make_stream(seed, "epsilon");
    double eps = 0.0;
    for (Index k = 0; k < samples; ++k)
        eps = std::max(eps, convex_coords(grid, sample_uniform_belief(grid.dimension(), rng)).radius);
    return eps;
}

}  // namespace dpomdp

#include "bodyfield/voxel_grid.hpp"

#include "bodyfield/parallel.hpp"
#include "bodyfield/triangle_qp.hpp"

#include <cmath>
#include <utility>

namespace bodyfield {

namespace {

// Voxel boxes are inflated by this fraction of the cell size during binning
// so faces touching a voxel boundary are listed on both sides.
constexpr double kBinInflation = 1e-9;

bool separated_on(const Vec3& axis, const Vec3& h, const Vec3& a, const Vec3& b, const Vec3& c) {
    if (axis.squaredNorm() < 1e-300) return false;
    const double pa = axis.dot(a), pb = axis.dot(b), pc = axis.dot(c);
    const double lo = std::min({pa, pb, pc});
    const double hi = std::max({pa, pb, pc});
    const double r = h.x() * std::abs(axis.x()) + h.y() * std::abs(axis.y()) + h.z() * std::abs(axis.z());
    return lo > r || hi < -r;
}

}  // namespace

bool triangle_box_overlap(const Vec3& box_center, const Vec3& half_size, const Vec3& a0,
                          const Vec3& b0, const Vec3& c0) {
    const Vec3 a = a0 - box_center, b = b0 - box_center, c = c0 - box_center;
    // Box face normals.
    for (int k = 0; k < 3; ++k) {
        const double lo = std::min({a[k], b[k], c[k]});
        const double hi = std::max({a[k], b[k], c[k]});
        if (lo > half_size[k] || hi < -half_size[k]) return false;
    }
    const std::array<Vec3, 3> edges = {b - a, c - b, a - c};
    if (separated_on(edges[0].cross(edges[1]), half_size, a, b, c)) return false;
    for (const Vec3& e : edges)
        for (int k = 0; k < 3; ++k)
            if (separated_on(Vec3::Unit(k).cross(e), half_size, a, b, c)) return false;
    return true;
}

VoxelIndex VoxelGrid::voxel_of(const Vec3& p) const {
    const Vec3 q = (p - origin_) / cell_;
    return {static_cast<int>(std::floor(q.x())), static_cast<int>(std::floor(q.y())),
            static_cast<int>(std::floor(q.z()))};
}

VoxelIndex VoxelGrid::clamp(const VoxelIndex& v) const {
    return {std::clamp(v[0], 0, dims_[0] - 1), std::clamp(v[1], 0, dims_[1] - 1),
            std::clamp(v[2], 0, dims_[2] - 1)};
}

Aabb VoxelGrid::voxel_box(const VoxelIndex& v) const {
    const Vec3 lo = origin_ + cell_ * Vec3(v[0], v[1], v[2]);
    return {lo, lo + Vec3::Constant(cell_)};
}

VoxelGrid build_grid(const TriMesh& mesh, int resolution) {
    if (mesh.empty()) throw GeometryError("cannot build a voxel grid over an empty mesh");
    if (resolution < 2) throw GeometryError("grid resolution must be >= 2");

    VoxelGrid grid;
    const Aabb box = mesh.bounds();
    const Vec3 extent = box.extent();
    const double longest = extent.maxCoeff();
    grid.cell_ = longest * (1.0 + 1e-6) / resolution;
    for (int k = 0; k < 3; ++k)
        grid.dims_[k] = std::max(1, static_cast<int>(std::ceil(extent[k] / grid.cell_))) + 2;
    grid.origin_ = box.lo - Vec3::Constant(grid.cell_);
    grid.face_count_ = mesh.face_count();

    const double cell = grid.cell_;
    const Vec3 half = Vec3::Constant(0.5 * cell * (1.0 + 2.0 * kBinInflation));
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;  // (voxel, face)
    pairs.reserve(mesh.face_count() * 4);
    for (std::size_t f = 0; f < mesh.face_count(); ++f) {
        const auto [a, b, c] = mesh.triangle(f);
        Aabb tb;
        tb.extend(a);
        tb.extend(b);
        tb.extend(c);
        const VoxelIndex lo = grid.clamp(grid.voxel_of(tb.lo - Vec3::Constant(kBinInflation * cell)));
        const VoxelIndex hi = grid.clamp(grid.voxel_of(tb.hi + Vec3::Constant(kBinInflation * cell)));
        for (int z = lo[2]; z <= hi[2]; ++z)
            for (int y = lo[1]; y <= hi[1]; ++y)
                for (int x = lo[0]; x <= hi[0]; ++x) {
                    const VoxelIndex v{x, y, z};
                    if (triangle_box_overlap(grid.voxel_box(v).center(), half, a, b, c))
                        pairs.emplace_back(static_cast<std::uint32_t>(grid.linear(v)),
                                           static_cast<std::uint32_t>(f));
                }
    }
    std::sort(pairs.begin(), pairs.end());
    grid.offsets_.assign(grid.voxel_count() + 1, 0);
    for (const auto& [v, f] : pairs) ++grid.offsets_[v + 1];
    for (std::size_t i = 1; i < grid.offsets_.size(); ++i) grid.offsets_[i] += grid.offsets_[i - 1];
    grid.faces_.reserve(pairs.size());
    for (const auto& [v, f] : pairs) grid.faces_.push_back(f);

    // Multi-source breadth-first search over the 26-neighbourhood gives the
    // exact Chebyshev distance to the nearest non-empty voxel.
    grid.empty_radius_.assign(grid.voxel_count(), -1);
    std::vector<std::size_t> frontier, next;
    for (std::size_t i = 0; i < grid.voxel_count(); ++i)
        if (grid.offsets_[i + 1] > grid.offsets_[i]) {
            grid.empty_radius_[i] = 0;
            frontier.push_back(i);
        }
    const VoxelIndex& d = grid.dims_;
    for (int radius = 1; !frontier.empty(); ++radius) {
        next.clear();
        for (std::size_t lin : frontier) {
            const int x = static_cast<int>(lin % d[0]), y = static_cast<int>(lin / d[0] % d[1]),
                      z = static_cast<int>(lin / (static_cast<std::size_t>(d[0]) * d[1]));
            for (int dz = -1; dz <= 1; ++dz)
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        const VoxelIndex n{x + dx, y + dy, z + dz};
                        if (!grid.inside(n)) continue;
                        const std::size_t nl = grid.linear(n);
                        if (grid.empty_radius_[nl] >= 0) continue;
                        grid.empty_radius_[nl] = radius;
                        next.push_back(nl);
                    }
        }
        frontier.swap(next);
    }
    return grid;
}

void VoxelGrid::traverse(const Ray& ray, double t_min, double t_max,
                         const std::function<void(std::size_t)>& visit) const {
    const Aabb box = bounds();
    double t0 = t_min, t1 = t_max;
    for (int k = 0; k < 3; ++k) {
        const double d = ray.direction[k];
        if (d == 0.0) {
            if (ray.origin[k] < box.lo[k] || ray.origin[k] > box.hi[k]) return;
            continue;
        }
        double ta = (box.lo[k] - ray.origin[k]) / d;
        double tb = (box.hi[k] - ray.origin[k]) / d;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (t0 > t1) return;

    VoxelIndex v = clamp(voxel_of(ray.at(t0)));
    std::array<int, 3> step{};
    Vec3 t_next, t_delta;
    for (int k = 0; k < 3; ++k) {
        const double d = ray.direction[k];
        if (d > 0.0) {
            step[k] = 1;
            t_next[k] = (origin_[k] + (v[k] + 1) * cell_ - ray.origin[k]) / d;
            t_delta[k] = cell_ / d;
        } else if (d < 0.0) {
            step[k] = -1;
            t_next[k] = (origin_[k] + v[k] * cell_ - ray.origin[k]) / d;
            t_delta[k] = -cell_ / d;
        } else {
            step[k] = 0;
            t_next[k] = kInf;
            t_delta[k] = kInf;
        }
    }
    for (;;) {
        visit(linear(v));
        int axis = 0;
        if (t_next[1] < t_next[axis]) axis = 1;
        if (t_next[2] < t_next[axis]) axis = 2;
        if (t_next[axis] > t1) return;
        v[axis] += step[axis];
        if (v[axis] < 0 || v[axis] >= dims_[axis]) return;
        t_next[axis] += t_delta[axis];
    }
}

// ------------------------------------------------------------ shells

ShellIterator::ShellIterator(const VoxelGrid& grid, const VoxelIndex& seed) : grid_(&grid), seed_(seed) {
    if (!grid.inside(seed)) throw GeometryError("shell seed voxel lies outside the grid");
    for (int k = 0; k < 3; ++k)
        max_ring_ = std::max({max_ring_, seed_[k], grid.dims()[k] - 1 - seed_[k]});
    // Rings closer than the nearest non-empty voxel hold nothing to yield.
    next_ring_ = grid.empty_radius(seed);
}

ShellIterator::ShellIterator(const VoxelGrid& grid, const Vec3& query)
    : ShellIterator(grid, grid.clamp(grid.voxel_of(query))) {
    query_ = query;
    seed_offset_ = grid.voxel_box(seed_).distance(query);
}

double ShellIterator::bound_of(const VoxelIndex& v) const {
    if (query_) return grid_->voxel_box(v).distance(*query_);
    double sum = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double gap = std::max(0, std::abs(v[k] - seed_[k]) - 1) * grid_->cell_size();
        sum += gap * gap;
    }
    return std::sqrt(sum);
}

void ShellIterator::push_ring(int ring) {
    const VoxelIndex& dims = grid_->dims();
    const VoxelIndex lo{std::max(0, seed_[0] - ring), std::max(0, seed_[1] - ring), std::max(0, seed_[2] - ring)};
    const VoxelIndex hi{std::min(dims[0] - 1, seed_[0] + ring), std::min(dims[1] - 1, seed_[1] + ring),
                        std::min(dims[2] - 1, seed_[2] + ring)};
    // Walks axis `a` from `from` to `to` with the other coordinates fixed.
    // A voxel with empty radius e has only empty voxels within e - 1 cells,
    // so the walk jumps e steps at a time through empty space.
    auto line = [&](VoxelIndex v, int a, int from, int to) {
        if (query_ && cutoff_ < kInf) {
            // Keep only the stretch of the line that can lie within the cutoff
            // of the query; one extra cell each way absorbs round-off.
            const Vec3& q = *query_;
            const double cell = grid_->cell_size();
            double perp2 = 0.0;
            for (int k = 0; k < 3; ++k) {
                if (k == a) continue;
                const double lo_k = grid_->origin()[k] + v[k] * cell;
                const double gap = std::max({0.0, lo_k - q[k], q[k] - (lo_k + cell)});
                perp2 += gap * gap;
            }
            if (perp2 > cutoff_ * cutoff_) return;
            const double h = std::sqrt(cutoff_ * cutoff_ - perp2);
            const double c0 = std::floor((q[a] - h - grid_->origin()[a]) / cell) - 1.0;
            const double c1 = std::floor((q[a] + h - grid_->origin()[a]) / cell) + 1.0;
            if (c0 > to || c1 < from) return;
            from = std::max(from, static_cast<int>(c0));
            to = std::min(to, static_cast<int>(c1));
        }
        for (v[a] = from; v[a] <= to;) {
            const std::size_t lin = grid_->linear(v);
            const int e = grid_->empty_radius(v);
            if (e > 0) {
                v[a] += e;
                continue;
            }
            const double b = bound_of(v);
            if (b <= cutoff_) heap_.push({b, lin, v});
            if (query_ && far_corner_cutoff_) {
                // A face listed here touches the (inflated) voxel box, so the
                // closest distance is at most the farthest corner of that box.
                const Aabb box = grid_->voxel_box(v).padded((kBinInflation + 0.01) * grid_->cell_size());
                const Vec3 far = (box.lo - *query_).cwiseAbs().cwiseMax((box.hi - *query_).cwiseAbs());
                set_cutoff(far.norm() * (1.0 + 1e-9));
            }
            ++v[a];
        }
    };
    if (ring == 0) {
        line(seed_, 0, seed_[0], seed_[0]);
        return;
    }
    // Caps z = seed +- ring over the full x-y square.
    for (int side : {-ring, ring}) {
        const int z = seed_[2] + side;
        if (z < 0 || z >= dims[2]) continue;
        for (int x = lo[0]; x <= hi[0]; ++x) line({x, 0, z}, 1, lo[1], hi[1]);
    }
    // Walls y = seed +- ring, strictly between the caps.
    const int z0 = std::max(lo[2], seed_[2] - ring + 1), z1 = std::min(hi[2], seed_[2] + ring - 1);
    for (int side : {-ring, ring}) {
        const int y = seed_[1] + side;
        if (y < 0 || y >= dims[1]) continue;
        for (int x = lo[0]; x <= hi[0]; ++x) line({x, y, 0}, 2, z0, z1);
    }
    // Walls x = seed +- ring, strictly between the y walls and the caps.
    const int y0 = std::max(lo[1], seed_[1] - ring + 1), y1 = std::min(hi[1], seed_[1] + ring - 1);
    for (int side : {-ring, ring}) {
        const int x = seed_[0] + side;
        if (x < 0 || x >= dims[0]) continue;
        for (int y = y0; y <= y1; ++y) line({x, y, 0}, 2, z0, z1);
    }
}

void ShellIterator::fill() {
    // Every voxel in ring >= r is at least (r - 1) cells away from the seed box.
    auto future_bound = [&](int ring) {
        return std::max(0.0, (ring - 1) * grid_->cell_size() - seed_offset_);
    };
    while (next_ring_ <= max_ring_ && future_bound(next_ring_) <= cutoff_ &&
           (heap_.empty() || heap_.top().lower_bound > future_bound(next_ring_)))
        push_ring(next_ring_++);
}

std::optional<ShellVoxel> ShellIterator::next() {
    fill();
    if (heap_.empty()) return std::nullopt;
    const Entry e = heap_.top();
    heap_.pop();
    return ShellVoxel{e.voxel, e.linear, e.lower_bound};
}

double ShellIterator::peek_lower_bound() {
    fill();
    return heap_.empty() ? kInf : heap_.top().lower_bound;
}

// ------------------------------------------------------------ closest point

namespace {

inline void consider(const TriMesh& mesh, const Vec3& x, std::uint32_t f, ClosestHit& best) {
    const Face& face = mesh.faces()[f];
    const auto& v = mesh.vertices();
    if (best.squared_distance < kInf) {
        // The distance to the supporting plane bounds the triangle distance from
        // below; the margin keeps faces that could tie after rounding.
        const Vec3 n = (v[face[1]] - v[face[0]]).cross(v[face[2]] - v[face[0]]);
        const double h = (x - v[face[0]]).dot(n);
        if (h * h * (1.0 - 1e-9) > best.squared_distance * n.squaredNorm()) return;
    }
    const TriangleClosestPoint r = closest_point_on_triangle_unchecked(x, v[face[0]], v[face[1]], v[face[2]]);
    if (r.squared_distance < best.squared_distance ||
        (r.squared_distance == best.squared_distance && f < best.face)) {
        best.face = f;
        best.barycentric = r.barycentric;
        best.point = r.point;
        best.squared_distance = r.squared_distance;
        best.active_set_size = r.active_set_size;
    }
}

struct VisitStamps {
    std::vector<std::uint32_t> stamp;
    std::uint32_t current = 0;

    void begin(std::size_t faces) {
        if (stamp.size() < faces) stamp.resize(faces, 0);
        if (++current == 0) {
            std::fill(stamp.begin(), stamp.end(), 0);
            current = 1;
        }
    }
};

}  // namespace

ClosestHit brute_closest_point(const TriMesh& mesh, const Vec3& x) {
    ClosestHit best;
    const auto n = static_cast<std::uint32_t>(mesh.face_count());
    for (std::uint32_t f = 0; f < n; ++f) consider(mesh, x, f, best);
    return best;
}

ClosestHit accel_closest_point(const VoxelGrid& grid, const TriMesh& mesh, const Vec3& x) {
    if (grid.face_count() != mesh.face_count())
        throw GeometryError("voxel grid was built for a different mesh");
    const Aabb bounds = grid.bounds();
    if (bounds.distance(x) > bounds.diagonal()) return brute_closest_point(mesh, x);

    thread_local VisitStamps stamps;
    stamps.begin(mesh.face_count());
    ShellIterator shells(grid, x);
    shells.enable_far_corner_cutoff();
    ClosestHit best;
    const double slack = 1e-12 * grid.cell_size();
    for (;;) {
        const double lb = shells.peek_lower_bound();
        if (lb == kInf) break;
        const double safe = lb * (1.0 - 1e-12) - slack;
        if (safe > 0.0 && safe * safe > best.squared_distance) break;
        const ShellVoxel sv = *shells.next();
        const double before = best.squared_distance;
        for (std::uint32_t f : grid.faces_in(sv.linear)) {
            if (stamps.stamp[f] == stamps.current) continue;
            stamps.stamp[f] = stamps.current;
            consider(mesh, x, f, best);
        }
        // Voxels beyond this bound would fail the test above, so the iterator may drop them.
        if (best.squared_distance < before)
            shells.set_cutoff((std::sqrt(best.squared_distance) + slack) / (1.0 - 1e-12) * (1.0 + 1e-12));
    }
    if (best.squared_distance == kInf) return brute_closest_point(mesh, x);
    return best;
}

std::vector<ClosestHit> brute_closest_points(const TriMesh& mesh, std::span<const Vec3> points) {
    std::vector<ClosestHit> out(points.size());
    parallel_for(points.size(), 64, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) out[i] = brute_closest_point(mesh, points[i]);
    });
    return out;
}

std::vector<ClosestHit> accel_closest_points(const VoxelGrid& grid, const TriMesh& mesh,
                                             std::span<const Vec3> points) {
    std::vector<ClosestHit> out(points.size());
    parallel_for(points.size(), 256, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) out[i] = accel_closest_point(grid, mesh, points[i]);
    });
    return out;
}

}  // namespace bodyfield

// waveray: a spectral wave-optics path tracer
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "geometry.hpp"

namespace waveray {

/// Binned-SAH BVH over all triangles of all meshes; leaves hold at most 4.
class Bvh {
public:
    struct PrimRef {
        int mesh;
        uint32_t prim;
        Aabb bounds;
        Vec3 centroid;
    };

    void build(const std::vector<TriangleMesh> &meshes) {
        m_prims.clear();
        m_nodes.clear();
        for (int m = 0; m < (int)meshes.size(); ++m)
            for (std::size_t p = 0; p < meshes[m].triangle_count(); ++p) {
                Vec3 a, b, c;
                meshes[m].triangle(p, a, b, c);
                PrimRef r;
                r.mesh = m;
                r.prim = (uint32_t)p;
                r.bounds.grow(a);
                r.bounds.grow(b);
                r.bounds.grow(c);
                r.centroid = r.bounds.center();
                m_prims.push_back(r);
            }
        if (m_prims.empty()) return;
        m_nodes.reserve(2 * m_prims.size());
        build_node(0, (uint32_t)m_prims.size());
    }

    const Aabb &bounds() const {
        static const Aabb empty;
        return m_nodes.empty() ? empty : m_nodes[0].bounds;
    }

    template <typename Callback>
    void traverse(const Ray &ray, Callback &&cb) const {
        if (m_nodes.empty()) return;
        Vec3 inv_dir{1 / ray.direction.x, 1 / ray.direction.y, 1 / ray.direction.z};
        Float t_max = ray.t_max;
        uint32_t stack[64];
        int sp = 0;
        stack[sp++] = 0;
        while (sp > 0) {
            const Node &node = m_nodes[stack[--sp]];
            if (!node.bounds.hit(ray, inv_dir, t_max)) continue;
            if (node.count > 0) {
                for (uint32_t i = 0; i < node.count; ++i) {
                    const PrimRef &r = m_prims[node.first + i];
                    cb(r.mesh, r.prim, t_max);
                }
            } else {
                stack[sp++] = node.first;
                stack[sp++] = node.right;
            }
        }
    }

private:
    struct Node {
        Aabb bounds;
        uint32_t first = 0;  // child index (inner) or first primitive (leaf)
        uint32_t right = 0;  // right child index (inner)
        uint32_t count = 0;  // primitive count; 0 marks an inner node
    };

    uint32_t build_node(uint32_t begin, uint32_t end) {
        uint32_t index = (uint32_t)m_nodes.size();
        m_nodes.push_back({});
        Aabb bounds, centroid_bounds;
        for (uint32_t i = begin; i < end; ++i) {
            bounds.grow(m_prims[i].bounds);
            centroid_bounds.grow(m_prims[i].centroid);
        }
        m_nodes[index].bounds = bounds;
        uint32_t n = end - begin;
        if (n <= 4) {
            m_nodes[index].first = begin;
            m_nodes[index].count = n;
            return index;
        }

        // binned SAH over the widest centroid axis
        Vec3 extent = centroid_bounds.hi - centroid_bounds.lo;
        int axis = extent.x > extent.y ? (extent.x > extent.z ? 0 : 2)
                                       : (extent.y > extent.z ? 1 : 2);
        constexpr int Bins = 16;
        Float lo = centroid_bounds.lo[axis], width = extent[axis];
        uint32_t mid = begin + n / 2;
        if (width > 1e-12) {
            struct Bin {
                Aabb bounds;
                uint32_t count = 0;
            } bins[Bins];
            auto bin_of = [&](const PrimRef &r) {
                int b = (int)((r.centroid[axis] - lo) / width * Bins);
                return std::min(b, Bins - 1);
            };
            for (uint32_t i = begin; i < end; ++i) {
                Bin &b = bins[bin_of(m_prims[i])];
                b.bounds.grow(m_prims[i].bounds);
                b.count++;
            }
            Float best_cost = Infinity;
            int best_split = -1;
            for (int split = 1; split < Bins; ++split) {
                Aabb left, right;
                uint32_t nl = 0, nr = 0;
                for (int b = 0; b < split; ++b) {
                    if (bins[b].count) left.grow(bins[b].bounds);
                    nl += bins[b].count;
                }
                for (int b = split; b < Bins; ++b) {
                    if (bins[b].count) right.grow(bins[b].bounds);
                    nr += bins[b].count;
                }
                if (nl == 0 || nr == 0) continue;
                Float cost = left.surface_area() * nl + right.surface_area() * nr;
                if (cost < best_cost) {
                    best_cost = cost;
                    best_split = split;
                }
            }
            if (best_split > 0) {
                auto it = std::partition(m_prims.begin() + begin, m_prims.begin() + end,
                                         [&](const PrimRef &r) { return bin_of(r) < best_split; });
                mid = (uint32_t)(it - m_prims.begin());
                if (mid == begin || mid == end) mid = begin + n / 2;
            }
        }

        uint32_t left = build_node(begin, mid);
        uint32_t right = build_node(mid, end);
        m_nodes[index].first = left;
        m_nodes[index].right = right;
        m_nodes[index].count = 0;
        return index;
    }

    std::vector<PrimRef> m_prims;
    std::vector<Node> m_nodes;
};

} // namespace waveray

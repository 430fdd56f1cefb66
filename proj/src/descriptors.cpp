#include "whcn/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "whcn/errors.hpp"

namespace whcn {

Matrix superpoint_descriptors(const LabeledCloud& cloud, const Matrix& geom_features,
                              const SuperpointPartition& partition) {
    const std::size_t n = cloud.size();
    if (geom_features.rows() != n || partition.assignment.size() != n)
        throw ShapeMismatch("superpoint_descriptors: inconsistent sizes");
    const int n_sp = partition.n_superpoints;

    double min_z = std::numeric_limits<double>::infinity();
    for (const auto& p : cloud.points) min_z = std::min(min_z, p[2]);

    Matrix desc(n_sp, kDescriptorDim);
    std::vector<int> counts(n_sp, 0);
    std::vector<std::array<double, 3>> bb_min(n_sp), bb_max(n_sp);
    for (int r = 0; r < n_sp; ++r) {
        bb_min[r].fill(std::numeric_limits<double>::infinity());
        bb_max[r].fill(-std::numeric_limits<double>::infinity());
    }

    // accumulation pass: sums, squared sums, bounding boxes
    Matrix sq_sums(n_sp, 4);
    for (std::size_t i = 0; i < n; ++i) {
        const int r = partition.assignment[i];
        counts[r] += 1;
        for (int c = 0; c < 4; ++c) {
            desc(r, c) += geom_features(i, c);
            sq_sums(r, c) += geom_features(i, c) * geom_features(i, c);
        }
        for (int ch = 0; ch < 3; ++ch) desc(r, 8 + ch) += cloud.colors[i][ch];
        for (int ax = 0; ax < 3; ++ax) {
            bb_min[r][ax] = std::min(bb_min[r][ax], cloud.points[i][ax]);
            bb_max[r][ax] = std::max(bb_max[r][ax], cloud.points[i][ax]);
        }
        desc(r, 14) += cloud.points[i][2] - min_z;
    }

    const double log_n = n > 1 ? std::log(static_cast<double>(n)) : 1.0;
    for (int r = 0; r < n_sp; ++r) {
        const double m = static_cast<double>(counts[r]);
        for (int c = 0; c < 4; ++c) {
            desc(r, c) /= m;
            const double var = std::max(0.0, sq_sums(r, c) / m - desc(r, c) * desc(r, c));
            desc(r, 4 + c) = std::sqrt(var);
        }
        for (int ch = 0; ch < 3; ++ch) desc(r, 8 + ch) /= m;
        for (int ax = 0; ax < 3; ++ax) desc(r, 11 + ax) = bb_max[r][ax] - bb_min[r][ax];
        desc(r, 14) /= m;
        desc(r, 15) = counts[r] > 1 ? std::log(m) / log_n : 0.0;
    }
    return desc;
}

ColumnStats column_stats(const std::vector<const Matrix*>& blocks) {
    if (blocks.empty()) throw EmptyCorpus("column_stats: no blocks");
    const std::size_t d = blocks[0]->cols();
    ColumnStats st;
    st.mean.assign(d, 0.0);
    st.std.assign(d, 0.0);
    std::size_t total = 0;
    for (const Matrix* b : blocks) {
        if (b->cols() != d) throw ShapeMismatch("column_stats: column mismatch");
        total += b->rows();
        for (std::size_t i = 0; i < b->rows(); ++i)
            for (std::size_t k = 0; k < d; ++k) st.mean[k] += (*b)(i, k);
    }
    for (std::size_t k = 0; k < d; ++k) st.mean[k] /= static_cast<double>(total);
    for (const Matrix* b : blocks)
        for (std::size_t i = 0; i < b->rows(); ++i)
            for (std::size_t k = 0; k < d; ++k) {
                const double dv = (*b)(i, k) - st.mean[k];
                st.std[k] += dv * dv;
            }
    for (std::size_t k = 0; k < d; ++k) {
        st.std[k] = std::sqrt(st.std[k] / static_cast<double>(total));
        if (st.std[k] < 1e-12) st.std[k] = 1.0;
    }
    return st;
}

void standardize_columns(Matrix& m, const ColumnStats& stats) {
    if (m.cols() != stats.mean.size())
        throw ShapeMismatch("standardize_columns: column mismatch");
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t k = 0; k < m.cols(); ++k)
            m(i, k) = (m(i, k) - stats.mean[k]) / stats.std[k];
}

}  // namespace whcn

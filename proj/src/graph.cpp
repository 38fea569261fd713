#include "randclust/graph.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <string>

#include "randclust/errors.hpp"

namespace randclust {

namespace {

constexpr NodeId kDenseGuard = 20000;
constexpr std::uint64_t kMaxNodes = 0xffffffffull;

SparseDirectedGraph build_from_sorted_pairs(NodeId n,
                                            const std::vector<std::pair<NodeId, NodeId>>& edges) {
    SparseDirectedGraph g;
    g.n = n;
    g.row_offsets.assign(static_cast<std::size_t>(n) + 1, 0);
    g.col_indices.reserve(edges.size());
    g.values.reserve(edges.size());
    for (const auto& [src, dst] : edges) {
        g.row_offsets[src + 1]++;
        g.col_indices.push_back(dst);
        g.values.push_back(1.0);
    }
    for (std::size_t i = 1; i <= n; ++i) g.row_offsets[i] += g.row_offsets[i - 1];
    return g;
}

// Parses one unsigned decimal, advancing pos past it and any following blanks.
bool parse_id(const std::string& line, std::size_t& pos, std::uint64_t& out) {
    const char* begin = line.data() + pos;
    const char* end = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr == begin) return false;
    pos = static_cast<std::size_t>(ptr - line.data());
    while (pos < line.size() && (line[pos] == '\t' || line[pos] == ' ')) ++pos;
    return true;
}

}  // namespace

SparseDirectedGraph SparseDirectedGraph::from_triplets(
    NodeId n, std::vector<std::tuple<NodeId, NodeId, double>> triplets) {
    std::sort(triplets.begin(), triplets.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    SparseDirectedGraph g;
    g.n = n;
    g.row_offsets.assign(static_cast<std::size_t>(n) + 1, 0);
    g.col_indices.reserve(triplets.size());
    g.values.reserve(triplets.size());
    NodeId prev_src = 0, prev_dst = 0;
    bool first = true;
    for (const auto& [src, dst, w] : triplets) {
        if (src >= n || dst >= n) throw ValidationError("triplet node id out of range");
        if (w <= 0.0) throw ValidationError("triplet weight must be positive");
        if (!first && src == prev_src && dst == prev_dst)
            throw ValidationError("duplicate triplet edge");
        first = false;
        prev_src = src;
        prev_dst = dst;
        g.row_offsets[src + 1]++;
        g.col_indices.push_back(dst);
        g.values.push_back(w);
    }
    for (std::size_t i = 1; i <= n; ++i) g.row_offsets[i] += g.row_offsets[i - 1];
    return g;
}

SparseDirectedGraph from_edge_list(std::istream& in, std::optional<NodeId> n_hint,
                                   bool one_based) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    std::string line;
    std::size_t line_no = 0;
    NodeId max_id = 0;
    bool saw_edge = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t pos = 0;
        while (pos < line.size() && (line[pos] == '\t' || line[pos] == ' ')) ++pos;
        if (pos == line.size() || line[pos] == '#') continue;
        std::uint64_t src_raw = 0, dst_raw = 0;
        if (!parse_id(line, pos, src_raw) || !parse_id(line, pos, dst_raw) || pos != line.size())
            throw ParseError("edge list parse error at line " + std::to_string(line_no) +
                             ": expected `src<TAB>dst`");
        if (one_based) {
            if (src_raw == 0 || dst_raw == 0)
                throw ParseError("edge list parse error at line " + std::to_string(line_no) +
                                 ": node id 0 in one-based file");
            --src_raw;
            --dst_raw;
        }
        if (n_hint && (src_raw >= *n_hint || dst_raw >= *n_hint))
            throw ParseError("edge list bounds error at line " + std::to_string(line_no) +
                             ": node id >= " + std::to_string(*n_hint));
        if (src_raw >= kMaxNodes || dst_raw >= kMaxNodes)
            throw ParseError("edge list bounds error at line " + std::to_string(line_no) +
                             ": node id too large");
        auto src = static_cast<NodeId>(src_raw);
        auto dst = static_cast<NodeId>(dst_raw);
        edges.emplace_back(src, dst);
        max_id = std::max({max_id, src, dst});
        saw_edge = true;
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    NodeId n = saw_edge ? max_id + 1 : 0;
    if (n_hint) n = std::max(n, *n_hint);
    return build_from_sorted_pairs(n, edges);
}

void to_edge_list(const SparseDirectedGraph& g, std::ostream& out) {
    for (NodeId i = 0; i < g.n; ++i)
        for (NodeId j : g.row_targets(i)) out << i << '\t' << j << '\n';
}

SparseDirectedGraph transpose(const SparseDirectedGraph& g) {
    SparseDirectedGraph t;
    t.n = g.n;
    t.row_offsets.assign(static_cast<std::size_t>(g.n) + 1, 0);
    t.col_indices.resize(g.nnz());
    t.values.resize(g.nnz());
    for (NodeId j : g.col_indices) t.row_offsets[j + 1]++;
    for (std::size_t i = 1; i <= g.n; ++i) t.row_offsets[i] += t.row_offsets[i - 1];
    std::vector<std::size_t> cursor(t.row_offsets.begin(), t.row_offsets.end() - 1);
    // Row-major scan of g emits each transposed row in increasing column order.
    for (NodeId i = 0; i < g.n; ++i) {
        for (std::size_t e = g.row_offsets[i]; e < g.row_offsets[i + 1]; ++e) {
            std::size_t slot = cursor[g.col_indices[e]]++;
            t.col_indices[slot] = i;
            t.values[slot] = g.values[e];
        }
    }
    return t;
}

DenseMatrix multiply_dense(const SparseDirectedGraph& g, const DenseMatrix& m, bool transposed) {
    if (static_cast<NodeId>(m.rows()) != g.n)
        throw ValidationError("multiply_dense: matrix has " + std::to_string(m.rows()) +
                              " rows, graph has " + std::to_string(g.n) + " nodes");
    if (transposed) return multiply_dense(transpose(g), m, false);
    DenseMatrix out = DenseMatrix::Zero(g.n, m.cols());
    for (NodeId i = 0; i < g.n; ++i) {
        auto out_row = out.row(i);
        for (std::size_t e = g.row_offsets[i]; e < g.row_offsets[i + 1]; ++e)
            out_row += g.values[e] * m.row(g.col_indices[e]);
    }
    return out;
}

std::pair<std::vector<NodeId>, std::vector<NodeId>> degrees(const SparseDirectedGraph& g) {
    std::vector<NodeId> out_deg(g.n, 0), in_deg(g.n, 0);
    for (NodeId i = 0; i < g.n; ++i)
        out_deg[i] = static_cast<NodeId>(g.row_offsets[i + 1] - g.row_offsets[i]);
    for (NodeId j : g.col_indices) in_deg[j]++;
    return {std::move(out_deg), std::move(in_deg)};
}

DenseMatrix to_dense(const SparseDirectedGraph& g) {
    if (g.n > kDenseGuard)
        throw CapacityError("to_dense: n = " + std::to_string(g.n) + " exceeds dense guard " +
                            std::to_string(kDenseGuard));
    DenseMatrix out = DenseMatrix::Zero(g.n, g.n);
    for (NodeId i = 0; i < g.n; ++i)
        for (std::size_t e = g.row_offsets[i]; e < g.row_offsets[i + 1]; ++e)
            out(i, g.col_indices[e]) = g.values[e];
    return out;
}

SparseDirectedGraph from_dense(const DenseMatrix& m) {
    if (m.rows() != m.cols()) throw ValidationError("from_dense: matrix must be square");
    SparseDirectedGraph g;
    g.n = static_cast<NodeId>(m.rows());
    g.row_offsets.assign(static_cast<std::size_t>(g.n) + 1, 0);
    for (NodeId i = 0; i < g.n; ++i) {
        for (NodeId j = 0; j < g.n; ++j) {
            double w = m(i, j);
            if (w < 0.0) throw ValidationError("from_dense: negative entry");
            if (w > 0.0) {
                g.col_indices.push_back(j);
                g.values.push_back(w);
            }
        }
        g.row_offsets[i + 1] = g.col_indices.size();
    }
    return g;
}

}  // namespace randclust

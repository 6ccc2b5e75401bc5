#include "uiminer/noise/overlay.hpp"

#include "uiminer/error.hpp"
#include "uiminer/util/base64.hpp"

#include "httplib.h"
#include "json.hpp"

namespace uiminer::noise {

namespace {

void subtree_sizes(const vh::ViewNode& node, std::vector<int>& sizes) {
    const std::size_t slot = sizes.size();
    sizes.push_back(1);
    for (const auto& child : node.children) {
        const std::size_t before = sizes.size();
        subtree_sizes(child, sizes);
        sizes[slot] += sizes[before];
    }
}

struct SplitUrl {
    std::string origin;
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    const auto scheme = url.find("://");
    const auto path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::vector<OverlayScore> OcclusionHeuristic::score(const vh::ViewTree& tree, std::span<const std::uint8_t>) const {
    const auto nodes = vh::preorder(tree);
    std::vector<int> sizes;
    sizes.reserve(nodes.size());
    for (const auto& root : tree.roots) subtree_sizes(root, sizes);

    std::vector<OverlayScore> out;
    out.reserve(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& bounds = nodes[i]->bounds;
        bool covered = false;
        // Descendants occupy positions (i, i + subtree size); anything after
        // that is drawn later and is not part of this node.
        for (std::size_t j = i + static_cast<std::size_t>(sizes[i]); j < nodes.size() && !covered; ++j) {
            const auto& cover = nodes[j]->bounds;
            covered = cover.area() > 0 && cover.contains(bounds);
        }
        out.push_back({nodes[i]->draw_index, covered ? 1.0 : 0.0, covered});
    }
    return out;
}

HttpOverlayScorer::HttpOverlayScorer(std::string url, double threshold, std::chrono::milliseconds timeout)
    : url_(std::move(url)), threshold_(threshold), timeout_(timeout) {}

std::vector<OverlayScore> HttpOverlayScorer::score(const vh::ViewTree& tree,
                                                   std::span<const std::uint8_t> screenshot) const {
    const auto [origin, path] = split_url(url_);
    httplib::Client client(origin);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    const std::string encoded = util::base64_encode(screenshot);

    std::vector<OverlayScore> out;
    for (const auto* node : vh::preorder(tree)) {
        const nlohmann::json body = {
            {"screenshot", encoded},
            {"mask",
             {{"left", node->bounds.left},
              {"top", node->bounds.top},
              {"right", node->bounds.right},
              {"bottom", node->bounds.bottom}}},
            {"draw_index", node->draw_index},
            {"screen_width", tree.screen_width},
            {"screen_height", tree.screen_height},
        };
        auto res = client.Post(path, body.dump(), "application/json");
        if (!res) {
            throw Error(ErrorKind::ScorerUnavailable, url_ + ": " + httplib::to_string(res.error()));
        }
        if (res->status != 200) {
            throw Error(ErrorKind::ScorerUnavailable, url_ + ": HTTP " + std::to_string(res->status));
        }
        double p = 0.0;
        try {
            p = nlohmann::json::parse(res->body).at("probability").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::ScorerUnavailable, url_ + ": malformed response: " + e.what());
        }
        if (p < 0.0 || p > 1.0) throw Error(ErrorKind::ScorerUnavailable, url_ + ": probability out of range");
        out.push_back({node->draw_index, p, p > threshold_});
    }
    return out;
}

std::vector<OverlayScore> detect_overlaid(const vh::ViewTree& tree) {
    return OcclusionHeuristic{}.score(tree, {});
}

std::vector<int> flagged_draw_indices(const std::vector<OverlayScore>& scores) {
    std::vector<int> out;
    for (const auto& s : scores) {
        if (s.flagged) out.push_back(s.draw_index);
    }
    return out;
}

}  // namespace uiminer::noise

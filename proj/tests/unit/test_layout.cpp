#include "uiminer/error.hpp"
#include "uiminer/store/layout.hpp"
#include "uiminer/util/png.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace uiminer;
using testsupport::make_node;
using testsupport::make_tree;

TEST(Layout, MatchesPixelReferenceOnRandomTrees) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 40; ++i) {
        const auto t = testsupport::random_tree(rng);
        ASSERT_EQ(store::render_layout(t), testsupport::reference_layout(t, 56, 100)) << i;
    }
}

TEST(Layout, MatchesReferenceAtOtherGridSizes) {
    std::mt19937_64 rng(4);
    for (const auto& [w, h] : std::vector<std::pair<int, int>>{{1, 1}, {7, 13}, {108, 192}}) {
        const auto t = testsupport::random_tree(rng);
        EXPECT_EQ(store::render_layout(t, w, h), testsupport::reference_layout(t, w, h));
    }
}

TEST(Layout, TextAndNonTextCells) {
    auto root = make_node("FrameLayout", {0, 0, 1080, 1920});
    root.children.push_back(make_node("TextView", {0, 0, 1080, 960}));
    root.children.push_back(make_node("ImageView", {0, 960, 1080, 1920}));
    const auto img = store::render_layout(make_tree({root}));
    EXPECT_EQ(img.at(0, 0), store::Cell::Text);
    EXPECT_EQ(img.at(55, 49), store::Cell::Text);
    EXPECT_EQ(img.at(0, 50), store::Cell::NonText);
    // Empty screen is all background; only leaves are painted.
    const auto empty = store::render_layout(make_tree({make_node("FrameLayout", {0, 0, 0, 0})}));
    EXPECT_EQ(empty.at(10, 10), store::Cell::Background);
}

TEST(Layout, LaterLeafWins) {
    auto root = make_node("FrameLayout", {0, 0, 1080, 1920});
    root.children.push_back(make_node("TextView", {0, 0, 1080, 1920}));
    root.children.push_back(make_node("Button", {0, 0, 1080, 1920}));
    const auto img = store::render_layout(make_tree({root}));
    EXPECT_TRUE(store::is_text_leaf(make_node("Button", {0, 0, 1, 1}, "", "Go")));
    EXPECT_FALSE(store::is_text_leaf(make_node("Button", {0, 0, 1, 1})));
    EXPECT_EQ(img.at(20, 20), store::Cell::NonText);
}

TEST(Layout, ScaleCovariance) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i) {
        auto t = testsupport::random_tree(rng);
        auto doubled = t;
        doubled.screen_width *= 2;
        doubled.screen_height *= 2;
        std::function<void(vh::ViewNode&)> scale = [&](vh::ViewNode& n) {
            n.bounds = {n.bounds.left * 2, n.bounds.top * 2, n.bounds.right * 2, n.bounds.bottom * 2};
            for (auto& c : n.children) scale(c);
        };
        for (auto& r : doubled.roots) scale(r);
        EXPECT_EQ(store::render_layout(t), store::render_layout(doubled));
    }
}

TEST(Layout, DistanceIsAMetricOnSamples) {
    std::mt19937_64 rng(6);
    std::vector<store::LayoutImage> imgs;
    for (int i = 0; i < 12; ++i) imgs.push_back(store::render_layout(testsupport::random_tree(rng)));
    for (const auto& a : imgs) {
        EXPECT_DOUBLE_EQ(store::layout_distance(a, a), 0.0);
        for (const auto& b : imgs) {
            const double ab = store::layout_distance(a, b);
            EXPECT_GE(ab, 0.0);
            EXPECT_LE(ab, 1.0);
            EXPECT_DOUBLE_EQ(ab, store::layout_distance(b, a));
            for (const auto& c : imgs) EXPECT_LE(ab, store::layout_distance(a, c) + store::layout_distance(c, b) + 1e-12);
        }
    }
}

TEST(Layout, DistanceCountsDifferingCells) {
    store::LayoutImage a{2, 2, {store::Cell::Text, store::Cell::Text, store::Cell::Background, store::Cell::NonText}};
    store::LayoutImage b{2, 2, {store::Cell::Text, store::Cell::NonText, store::Cell::Background, store::Cell::Text}};
    EXPECT_DOUBLE_EQ(store::layout_distance(a, b), 0.5);
    store::LayoutImage c{1, 2, {store::Cell::Text, store::Cell::Text}};
    EXPECT_THROW(store::layout_distance(a, c), Error);
}

TEST(Layout, PngRendering) {
    const auto img = store::render_layout(testsupport::distinct_tree(5));
    const auto png = store::layout_to_png(img);
    ASSERT_GT(png.size(), 8u);
    EXPECT_EQ(png[1], 'P');
    EXPECT_EQ(png[2], 'N');
    EXPECT_EQ(png[3], 'G');
}

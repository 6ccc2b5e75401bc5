#include "uiminer/error.hpp"
#include "uiminer/util/md5.hpp"
#include "uiminer/vh/json_tree.hpp"
#include "uiminer/vh/view_tree.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace uiminer;
using testsupport::make_node;
using testsupport::make_tree;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no uiminer::Error thrown";
    return ErrorKind::Io;
}

}  // namespace

TEST(ParseHierarchy, SingleButton) {
    const auto t = vh::parse_hierarchy(
        R"(<node class="android.widget.Button" bounds="[0,0][100,50]" clickable="true"/>)", 1080, 1920);
    ASSERT_EQ(t.node_count(), 1u);
    const auto& n = t.roots.at(0);
    EXPECT_EQ(n.draw_index, 0);
    EXPECT_EQ(n.bounds, (vh::Rect{0, 0, 100, 50}));
    EXPECT_TRUE(n.clickable);
    EXPECT_FALSE(n.editable);
    EXPECT_EQ(t.screen_width, 1080);
}

TEST(ParseHierarchy, DegenerateBoundsAccepted) {
    const auto t = vh::parse_hierarchy(R"(<node class="android.view.View" bounds="[10,20][10,20]"/>)", 100, 100);
    EXPECT_EQ(t.roots[0].bounds.area(), 0);
}

TEST(ParseHierarchy, TwelveNodeFixtureRoundTrips) {
    const auto xml = testsupport::read_file(testsupport::test_fixture("dump_12.xml"));
    const auto t = vh::parse_hierarchy(xml, 1080, 1920);
    EXPECT_EQ(t.node_count(), 12u);
    EXPECT_EQ(t.source_digest, util::md5_hex(xml));

    int depth_max = 0;
    vh::for_each_preorder(t, [&](const vh::ViewNode&, int d) { depth_max = std::max(depth_max, d); });
    EXPECT_EQ(depth_max, 2);

    const auto* terms = vh::find_by_resource_id(t, "com.example.mail:id/terms");
    ASSERT_NE(terms, nullptr);
    EXPECT_EQ(terms->text, "I agree to the \"Terms\" <v2>");
    const auto* help = vh::find_by_resource_id(t, "com.example.mail:id/help");
    ASSERT_NE(help, nullptr);
    EXPECT_EQ(help->content_desc, "Help & feedback");
    EXPECT_TRUE(help->long_clickable);
    // Absent enabled attribute reads as false.
    const auto* submit = vh::find_by_resource_id(t, "com.example.mail:id/submit");
    ASSERT_NE(submit, nullptr);
    EXPECT_FALSE(submit->enabled);
    EXPECT_TRUE(vh::find_by_resource_id(t, "com.example.mail:id/email")->editable);

    const auto again = vh::parse_hierarchy(vh::serialize_hierarchy(t), 1080, 1920);
    EXPECT_TRUE(vh::structurally_equal(t, again));
}

TEST(ParseHierarchy, DrawIndexIsPreorderPosition) {
    const auto t = vh::parse_hierarchy(testsupport::read_file(testsupport::test_fixture("dump_12.xml")), 1080, 1920);
    const auto nodes = vh::preorder(t);
    for (std::size_t i = 0; i < nodes.size(); ++i) EXPECT_EQ(nodes[i]->draw_index, static_cast<int>(i));
}

TEST(ParseHierarchy, ErrorKinds) {
    EXPECT_EQ(kind_of([] { vh::parse_hierarchy("<node class='a'", 10, 10); }), ErrorKind::MalformedXml);
    EXPECT_EQ(kind_of([] { vh::parse_hierarchy("not xml at all", 10, 10); }), ErrorKind::MalformedXml);
    EXPECT_EQ(kind_of([] { vh::parse_hierarchy("<a><b></a></b>", 10, 10); }), ErrorKind::MalformedXml);
    EXPECT_EQ(kind_of([] { vh::parse_hierarchy("<hierarchy rotation=\"0\"></hierarchy>", 10, 10); }),
              ErrorKind::EmptyHierarchy);
    EXPECT_EQ(kind_of([] { vh::parse_hierarchy(R"(<node bounds="[0,0,10,10]"/>)", 10, 10); }),
              ErrorKind::MalformedBounds);
    EXPECT_EQ(kind_of([] { vh::parse_hierarchy(R"(<node bounds="[5,0][1,10]"/>)", 10, 10); }),
              ErrorKind::MalformedBounds);
    EXPECT_EQ(kind_of([] { vh::parse_hierarchy(R"(<node bounds="[-1,0][1,10]"/>)", 10, 10); }),
              ErrorKind::MalformedBounds);
}

TEST(ParseBounds, Grammar) {
    EXPECT_EQ(vh::parse_bounds("[1,2][3,4]"), (vh::Rect{1, 2, 3, 4}));
    EXPECT_EQ(vh::format_bounds({1, 2, 3, 4}), "[1,2][3,4]");
    for (const char* bad : {"", "[1,2][3,4] ", " [1,2][3,4]", "[1,2][3]", "[1, 2][3,4]", "[a,2][3,4]", "[1,2][3,4][5,6]",
                            "[1,2]", "(1,2)(3,4)", "[1,4][3,2]"}) {
        EXPECT_THROW(vh::parse_bounds(bad), Error) << bad;
    }
}

TEST(SerializeHierarchy, OneNodeEmitsEveryAttribute) {
    const auto t = make_tree({make_node("Button", {0, 0, 10, 10})});
    const auto xml = vh::serialize_hierarchy(t);
    for (const char* attr : {"index=", "text=\"\"", "resource-id=\"\"", "class=", "content-desc=", "clickable=",
                             "enabled=", "scrollable=", "long-clickable=", "bounds=\"[0,0][10,10]\""}) {
        EXPECT_NE(xml.find(attr), std::string::npos) << attr;
    }
    EXPECT_TRUE(vh::structurally_equal(t, vh::parse_hierarchy(xml, 1080, 1920)));
}

TEST(SerializeHierarchy, RandomTreesRoundTrip) {
    std::mt19937_64 rng(1234);
    for (int i = 0; i < 300; ++i) {
        const auto t = testsupport::random_tree(rng, 50);
        const auto back = vh::parse_hierarchy(vh::serialize_hierarchy(t), t.screen_width, t.screen_height);
        ASSERT_TRUE(vh::structurally_equal(t, back)) << vh::serialize_hierarchy(t);
    }
}

TEST(InteractiveElements, Predicate) {
    auto text = make_node("TextView", {0, 0, 10, 10}, "", "hello");
    auto button = make_node("Button", {0, 10, 10, 20}, "login_button", "Log in", true);
    EXPECT_EQ(vh::interactive_elements(make_tree({text})).size(), 0u);
    auto frame = make_node("FrameLayout", {0, 0, 100, 100});
    frame.children = {text, button};
    const auto t = make_tree({frame});
    const auto els = vh::interactive_elements(t);
    ASSERT_EQ(els.size(), 1u);
    EXPECT_EQ(els[0]->resource_id, "login_button");

    auto edit = make_node("EditText", {0, 0, 10, 10}, "email");
    const auto t2 = make_tree({edit});
    ASSERT_EQ(vh::interactive_elements(t2).size(), 1u);
    EXPECT_TRUE(vh::interactive_elements(t2)[0]->editable);

    auto disabled = make_node("Button", {0, 0, 10, 10}, "x", "", true);
    disabled.enabled = false;
    EXPECT_TRUE(vh::interactive_elements(make_tree({disabled})).empty());
}

TEST(InteractiveElements, SubsequenceOfPreorder) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        const auto t = testsupport::random_tree(rng);
        const auto all = vh::preorder(t);
        std::size_t pos = 0;
        for (const auto* e : vh::interactive_elements(t)) {
            while (pos < all.size() && all[pos] != e) ++pos;
            ASSERT_LT(pos, all.size());
            EXPECT_TRUE(e->is_interactive());
        }
    }
}

TEST(SerializeForPrompt, LineFormat) {
    const auto t = make_tree({make_node("Button", {0, 0, 10, 10}, "login_button", "Log in", true)});
    EXPECT_EQ(vh::serialize_for_prompt(t, 4000), "1. Button id=login_button text=\"Log in\" desc=\"\"");
    EXPECT_EQ(vh::serialize_for_prompt(make_tree({make_node("TextView", {0, 0, 1, 1})}), 4000),
              "(no interactive elements)");
}

TEST(SerializeForPrompt, TruncatesWholeLinesAndCountsOmitted) {
    std::vector<vh::ViewNode> kids;
    for (int i = 0; i < 40; ++i) {
        char id[8];
        std::snprintf(id, sizeof id, "b%02d", i);
        kids.push_back(make_node("Button", {0, i * 10, 100, i * 10 + 10}, id, "Go", true));
    }
    auto root = make_node("LinearLayout", {0, 0, 100, 400});
    root.children = kids;
    const auto t = make_tree({root});
    const auto full = vh::serialize_for_prompt(t, 100000);
    const std::string line = "1. Button id=b00 text=\"Go\" desc=\"\"";
    ASSERT_EQ(full.substr(0, line.size()), line);

    // Ten lines of equal length plus newlines plus the marker.
    std::size_t ten = 0;
    std::size_t pos = 0;
    for (int i = 0; i < 10; ++i) pos = full.find('\n', pos) + 1;
    ten = pos;  // includes the trailing newline after line 10
    const std::string marker = "(+30 omitted)";
    const auto out = vh::serialize_for_prompt(t, ten + marker.size());
    EXPECT_EQ(out, full.substr(0, ten) + marker);
    EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 10);
}

TEST(SerializeForPrompt, NeverExceedsBudget) {
    std::mt19937_64 rng(77);
    for (int i = 0; i < 300; ++i) {
        const auto t = testsupport::random_tree(rng, 60);
        const std::size_t budget = 256 + rng() % 600;
        EXPECT_LE(vh::serialize_for_prompt(t, budget).size(), budget);
    }
}

TEST(JsonTree, FixtureFormRoundTrips) {
    const auto j = nlohmann::json::parse(R"({"class": "FrameLayout", "bounds": [0,0,100,100], "children": [
        {"class": "Button", "id": "ok", "text": "OK", "bounds": [0,0,50,50], "clickable": true},
        {"class": "EditText", "id": "name", "bounds": [0,50,100,100]}]})");
    const auto t = vh::tree_from_json(j, 100, 100);
    ASSERT_EQ(t.node_count(), 3u);
    EXPECT_EQ(t.roots[0].widget_class, "android.widget.FrameLayout");
    EXPECT_TRUE(t.roots[0].enabled);
    EXPECT_TRUE(t.roots[0].children[1].editable);
    EXPECT_EQ(t.roots[0].children[1].draw_index, 2);
    const auto back = vh::tree_from_json(vh::node_to_json(t.roots[0]), 100, 100);
    EXPECT_TRUE(vh::structurally_equal(t, back));
}

#include "support.hpp"

#include "uiminer/noise/type_index.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <unistd.h>

namespace testsupport {

using namespace uiminer;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TempDir::TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("uiminer-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

vh::ViewNode make_node(const std::string& cls, vh::Rect bounds, const std::string& id, const std::string& text,
                       bool clickable) {
    vh::ViewNode n;
    n.widget_class = cls.find('.') == std::string::npos ? "android.widget." + cls : cls;
    n.bounds = bounds;
    n.resource_id = id;
    n.text = text;
    n.clickable = clickable;
    return n;
}

vh::ViewTree make_tree(std::vector<vh::ViewNode> roots, int w, int h) {
    vh::ViewTree t;
    t.roots = std::move(roots);
    t.screen_width = w;
    t.screen_height = h;
    vh::normalize(t);
    return t;
}

namespace {

const std::vector<std::string> kClasses = {
    "android.widget.Button",      "android.widget.TextView",  "android.widget.EditText",
    "android.widget.ImageView",   "android.widget.CheckBox",  "android.widget.FrameLayout",
    "android.widget.LinearLayout", "android.widget.RatingBar", "android.view.View",
    "androidx.recyclerview.widget.RecyclerView", "com.example.CustomWidget"};

const std::vector<std::string> kTexts = {"", "",           "OK",        "Sign in", "a & b",  "<tag>", "say \"hi\"",
                                         "it's", "Écrire", "北京",       "ニュース", "x\ny",  "tab\there", " padded "};

std::string pick(std::mt19937_64& rng, const std::vector<std::string>& v) { return v[rng() % v.size()]; }

vh::ViewNode random_node(std::mt19937_64& rng, vh::Rect box, int depth, int& budget) {
    vh::ViewNode n;
    n.widget_class = pick(rng, kClasses);
    n.bounds = box;
    if (rng() % 2) n.resource_id = "id_" + std::to_string(rng() % 1000);
    n.text = pick(rng, kTexts);
    if (rng() % 3 == 0) n.content_desc = pick(rng, kTexts);
    n.clickable = rng() % 2;
    n.long_clickable = rng() % 4 == 0;
    n.scrollable = rng() % 5 == 0;
    n.enabled = rng() % 6 != 0;
    --budget;
    if (depth < 4 && budget > 0 && box.width() >= 8 && box.height() >= 8) {
        const int kids = static_cast<int>(rng() % 4);
        for (int k = 0; k < kids && budget > 0; ++k) {
            const int w = box.width(), h = box.height();
            const int l = box.left + static_cast<int>(rng() % static_cast<unsigned>(w / 2 + 1));
            const int t = box.top + static_cast<int>(rng() % static_cast<unsigned>(h / 2 + 1));
            const int r = l + static_cast<int>(rng() % static_cast<unsigned>(box.right - l + 1));
            const int b = t + static_cast<int>(rng() % static_cast<unsigned>(box.bottom - t + 1));
            n.children.push_back(random_node(rng, {l, t, r, b}, depth + 1, budget));
        }
    }
    return n;
}

}  // namespace

vh::ViewTree random_tree(std::mt19937_64& rng, int max_nodes) {
    int budget = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_nodes));
    std::vector<vh::ViewNode> roots;
    const int nroots = rng() % 5 == 0 ? 2 : 1;
    for (int i = 0; i < nroots && budget > 0; ++i) roots.push_back(random_node(rng, {0, 0, 1080, 1920}, 0, budget));
    return make_tree(std::move(roots));
}

device::Action random_action(std::mt19937_64& rng) {
    static const std::vector<std::string> ids = {"submit", "login_button", "com.app:id/email", "checkbox_policy",
                                                 "a",      "x-1",          "agree",            "btn.ok"};
    static const std::vector<std::string> values = {"example@gmail.com", "hello world", "123456789", "Aa1!aaaa",
                                                    "two  spaces",       "北京",         "Paris",     "a,b;c"};
    switch (rng() % 4) {
        case 0: return device::Action::tap(pick(rng, ids));
        case 1: return device::Action::long_tap(pick(rng, ids));
        case 2: return device::Action::scroll(static_cast<device::Direction>(rng() % 4));
        default: return device::Action::input(pick(rng, ids), pick(rng, values));
    }
}

store::LayoutImage reference_layout(const vh::ViewTree& tree, int grid_w, int grid_h) {
    const int W = tree.screen_width, H = tree.screen_height;
    std::vector<store::Cell> canvas(static_cast<std::size_t>(W) * H, store::Cell::Background);
    for (const auto* leaf : vh::leaves(tree)) {
        const auto cell = store::is_text_leaf(*leaf) ? store::Cell::Text : store::Cell::NonText;
        const auto& b = leaf->bounds;
        for (int y = std::max(0, b.top); y < std::min(H, b.bottom); ++y) {
            for (int x = std::max(0, b.left); x < std::min(W, b.right); ++x) {
                canvas[static_cast<std::size_t>(y) * W + x] = cell;
            }
        }
    }
    store::LayoutImage img;
    img.width = grid_w;
    img.height = grid_h;
    for (int j = 0; j < grid_h; ++j) {
        for (int i = 0; i < grid_w; ++i) {
            const long px = (2L * i + 1) * W / (2L * grid_w);
            const long py = (2L * j + 1) * H / (2L * grid_h);
            img.cells.push_back(canvas[static_cast<std::size_t>(py) * W + px]);
        }
    }
    return img;
}

}  // namespace testsupport

namespace testsupport {

vh::ViewTree distinct_tree(int variant, const std::string& text) {
    static const std::vector<std::string> kinds = {"Button", "TextView", "ImageView", "CheckBox"};
    auto content = make_node("LinearLayout", {0, 100, 1080, 1900});
    for (int digit = 0; digit < 6; ++digit) {
        const int y = 120 + digit * 200;
        const auto& cls = kinds[static_cast<std::size_t>((variant >> (2 * digit)) & 3)];
        content.children.push_back(
            make_node(cls, {40, y, 1040, y + 180}, "item" + std::to_string(digit), text, cls == "Button"));
    }
    auto root = make_node("FrameLayout", {0, 0, 1080, 1920});
    root.children.push_back(make_node("TextView", {0, 0, 1080, 90}, "title", "Screen " + text));
    root.children.push_back(std::move(content));
    return make_tree({root});
}

InjectedCorpus injected_corpus(int distinct, int k, std::uint64_t seed, const std::string& app_id) {
    std::mt19937_64 rng(seed);
    // Copies go after their original; pick (original, slot) pairs and build
    // the final order before assigning timestamps.
    std::vector<int> order;
    for (int i = 0; i < distinct; ++i) order.push_back(i);
    std::vector<int> copy_source;
    for (int c = 0; c < k; ++c) {
        const int src = static_cast<int>(rng() % static_cast<unsigned>(distinct));
        auto pos = std::find(order.begin(), order.end(), src);
        const auto after = static_cast<std::size_t>(pos - order.begin()) + 1;
        const auto slot = after + rng() % (order.size() - after + 1);
        order.insert(order.begin() + static_cast<long>(slot), distinct + c);
        copy_source.push_back(src);
    }

    InjectedCorpus corpus;
    std::map<int, std::size_t> first_pos;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const int tag = order[i];
        const bool copy = tag >= distinct;
        const int variant = copy ? copy_source[static_cast<std::size_t>(tag - distinct)] : tag;
        auto tree = distinct_tree(variant, copy ? "copy " + std::to_string(tag) : "orig");
        store::DatasetRecord r;
        r.app_id = app_id;
        r.app_category = "Tools";
        r.activity_name = "MainActivity";
        r.captured_at = 1000 + static_cast<std::int64_t>(i);
        r.screen_width = tree.screen_width;
        r.screen_height = tree.screen_height;
        r.record_id = "rec-" + std::to_string(i);
        if (copy) {
            corpus.duplicate_of[i] = first_pos.at(variant);
        } else {
            first_pos[variant] = i;
        }
        corpus.records.push_back(std::move(r));
        corpus.trees.push_back(std::move(tree));
    }
    return corpus;
}

std::vector<OverlayFixture> overlay_fixtures() {
    std::vector<OverlayFixture> out;
    auto screen = [](std::vector<vh::ViewNode> extra_children) {
        auto root = make_node("FrameLayout", {0, 0, 1080, 1920});
        auto content = make_node("LinearLayout", {0, 200, 1080, 1800});
        content.children.push_back(make_node("TextView", {40, 240, 1040, 340}, "headline", "Inbox"));
        content.children.push_back(make_node("Button", {40, 400, 1040, 560}, "compose", "Compose", true));
        content.children.push_back(make_node("EditText", {40, 620, 1040, 760}, "search"));
        root.children.push_back(std::move(content));
        for (auto& n : extra_children) root.children.push_back(std::move(n));
        return root;
    };

    // Occluded: a later view that is not an ancestor fully covers something.
    out.push_back({"fullscreen_dialog", make_tree({screen({make_node("View", {0, 0, 1080, 1920}, "scrim")})}), true});
    out.push_back({"covers_button", make_tree({screen({make_node("ImageView", {20, 380, 1060, 580}, "banner")})}),
                   true});
    out.push_back({"covers_edit_exactly", make_tree({screen({make_node("View", {40, 620, 1040, 760}, "mask")})}),
                   true});
    {
        auto popup = make_node("FrameLayout", {0, 150, 1080, 1850}, "popup");
        popup.children.push_back(make_node("Button", {100, 1600, 980, 1700}, "close", "Close", true));
        out.push_back({"popup_with_children", make_tree({screen({popup})}), true});
    }
    {
        // Second window over the first, as UIAutomator reports for dialogs.
        auto dialog = make_node("FrameLayout", {0, 0, 1080, 1920}, "dialog_root");
        dialog.children.push_back(make_node("TextView", {100, 800, 980, 900}, "msg", "Saved"));
        out.push_back({"second_window", make_tree({screen({}), dialog}), true});
    }
    out.push_back({"covers_headline", make_tree({screen({make_node("Toolbar", {0, 200, 1080, 360}, "bar")})}), true});
    out.push_back(
        {"covers_content", make_tree({screen({make_node("WebView", {0, 190, 1080, 1810}, "ad_web")})}), true});
    {
        auto sheet = make_node("LinearLayout", {0, 560, 1080, 1920}, "sheet");
        sheet.children.push_back(make_node("Button", {40, 1700, 1040, 1880}, "share", "Share", true));
        out.push_back({"bottom_sheet_over_edit", make_tree({screen({sheet})}), true});
    }
    out.push_back({"toast_over_headline",
                   make_tree({screen({make_node("TextView", {30, 230, 1050, 350}, "toast", "Copied")})}), true});
    {
        auto nested = make_node("FrameLayout", {0, 0, 1080, 1920}, "overlay_host");
        auto inner = make_node("FrameLayout", {0, 0, 1080, 1920}, "overlay_inner");
        inner.children.push_back(make_node("ProgressBar", {490, 910, 590, 1010}, "spinner"));
        nested.children.push_back(std::move(inner));
        out.push_back({"nested_fullscreen_overlay", make_tree({screen({nested})}), true});
    }

    // Not occluded: later views that overlap only partly, sit elsewhere, have
    // no area, or are descendants of what they cover.
    out.push_back({"plain", make_tree({screen({})}), false});
    out.push_back(
        {"half_cover", make_tree({screen({make_node("View", {540, 380, 1080, 580}, "half")})}), false});
    out.push_back({"offset_by_one", make_tree({screen({make_node("View", {41, 400, 1080, 560}, "shifted")})}), false});
    out.push_back({"footer_only", make_tree({screen({make_node("Button", {40, 1820, 1040, 1900}, "ok", "OK", true)})}),
                   false});
    out.push_back({"zero_area", make_tree({screen({make_node("View", {0, 0, 0, 0}, "empty")})}), false});
    out.push_back(
        {"degenerate_line", make_tree({screen({make_node("View", {40, 500, 1040, 500}, "line")})}), false});
    {
        // A child exactly as large as its parent does not hide the parent.
        auto card = make_node("FrameLayout", {0, 1810, 1080, 1900}, "card");
        card.children.push_back(make_node("ImageView", {0, 1810, 1080, 1900}, "card_image"));
        out.push_back({"child_fills_parent", make_tree({screen({card})}), false});
    }
    out.push_back({"two_halves",
                   make_tree({screen({make_node("View", {0, 380, 540, 780}, "left"),
                                      make_node("View", {540, 380, 1080, 780}, "right")})}),
                   false});
    out.push_back({"side_strip", make_tree({screen({make_node("View", {1040, 0, 1080, 1920}, "edge")})}), false});
    {
        auto fab = make_node("ImageButton", {900, 1650, 1040, 1790}, "fab");
        fab.clickable = true;
        out.push_back({"floating_button_in_gap", make_tree({screen({fab})}), false});
    }
    return out;
}

}  // namespace testsupport

#include "uiminer/device/sim_app.hpp"
#include "uiminer/policy/reply_parser.hpp"

#include "json.hpp"

namespace testsupport {

AblationTally run_ablation_corpus() {
    const auto corpus = nlohmann::json::parse(read_file(test_fixture("ablation_replies.json")));
    std::map<std::string, device::SimApp> apps;
    AblationTally tally;
    auto hits = [](const std::vector<device::Action>& intended, std::vector<device::Action> got) {
        std::size_t n = 0;
        for (const auto& a : intended) {
            const auto it = std::find(got.begin(), got.end(), a);
            if (it == got.end()) continue;
            got.erase(it);
            ++n;
        }
        return n;
    };
    for (const auto& e : corpus.at("entries")) {
        const std::string app_id = e.at("app");
        if (!apps.count(app_id)) apps.emplace(app_id, device::load_sim_app(fixture("suite/" + app_id + ".json")));
        const auto& tree = apps.at(app_id).states.at(e.at("state").get<std::string>()).tree;

        std::vector<device::Action> intended;
        for (const auto& prim : e.at("intended")) {
            const auto p = policy::parse_reply(prim.get<std::string>());
            intended.insert(intended.end(), p.steps.begin(), p.steps.end());
        }
        ++tally.entries;
        tally.intended += intended.size();
        tally.primitive_hits += hits(intended, policy::parse_reply(e.at("primitive_reply").get<std::string>()).steps);
        tally.free_text_hits +=
            hits(intended, policy::parse_free_text(e.at("free_text_reply").get<std::string>(), tree).steps);
    }
    return tally;
}

}  // namespace testsupport

namespace testsupport {

std::vector<std::shared_ptr<const device::SimApp>> load_suite() {
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(fixture("suite"))) {
        const auto name = entry.path().filename().string();
        if (name.rfind("com.", 0) == 0 && entry.path().extension() == ".json") paths.push_back(entry.path());
    }
    std::sort(paths.begin(), paths.end());
    std::vector<std::shared_ptr<const device::SimApp>> apps;
    for (const auto& p : paths) apps.push_back(std::make_shared<const device::SimApp>(device::load_sim_app(p)));
    return apps;
}

std::shared_ptr<const policy::Policy> scripted_policy(const std::filesystem::path& rules, const std::string& name) {
    auto backend = std::make_shared<const llm::ScriptedBackend>(llm::ScriptedBackend::from_file(rules));
    return std::make_shared<const policy::LlmPolicy>(name, backend);
}

}  // namespace testsupport

namespace testsupport {

store::DatasetRecord store_screen(store::DatasetStore& st, const vh::ViewTree& tree, const std::string& app_id,
                                  std::int64_t captured_at, store::RecordStatus status, const std::string& activity) {
    device::ScreenCapture cap;
    cap.tree = tree;
    cap.app_id = app_id;
    cap.activity_name = activity;
    cap.captured_at = captured_at;
    cap.screenshot = store::layout_to_png(store::render_layout(tree));
    const auto id = st.ingest_capture(cap, true).record_id;
    auto rec = st.get_record(id);
    if (status != store::RecordStatus::Pending) {
        rec.status = status;
        if (status == store::RecordStatus::AutoRemoved) {
            rec.flags.push_back({noise::NoiseKind::Overlaid, "0", noise::FlagSource::Auto});
        } else if (status == store::RecordStatus::Flagged) {
            rec.flags.push_back({noise::NoiseKind::Other, "blurry", noise::FlagSource::Human});
        }
        st.put_record(rec);
    }
    return rec;
}

std::vector<std::string> build_retrieval_corpus(store::DatasetStore& st, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<vh::ViewTree> trees;
    std::vector<store::LayoutImage> layouts;
    while (trees.size() < 10) {
        auto t = random_tree(rng, 30);
        auto img = store::render_layout(t);
        if (std::find(layouts.begin(), layouts.end(), img) != layouts.end()) continue;
        layouts.push_back(std::move(img));
        trees.push_back(std::move(t));
    }
    // Same bounds and text-ness, different ids and words.
    auto twin = trees[0];
    std::function<void(vh::ViewNode&)> relabel = [&](vh::ViewNode& n) {
        if (!n.resource_id.empty()) n.resource_id += "_twin";
        if (!n.text.empty()) n.text = "other words";
        for (auto& c : n.children) relabel(c);
    };
    for (auto& r : twin.roots) relabel(r);
    trees[6] = twin;

    std::vector<std::string> ids;
    for (std::size_t i = 0; i < trees.size(); ++i) {
        ids.push_back(store_screen(st, trees[i], "com.test.retrieval", 100 + static_cast<std::int64_t>(i),
                                   store::RecordStatus::Validated)
                          .record_id);
    }
    return ids;
}

}  // namespace testsupport

namespace testsupport {

ServiceHarness::ServiceHarness(std::shared_ptr<store::DatasetStore> store, annotate::ServiceOptions options)
    : service_(std::make_unique<annotate::AnnotationService>(std::move(store), options)) {
    port_ = service_->bind_any_port("127.0.0.1");
    thread_ = std::thread([this] { service_->serve(); });
    service_->wait_until_ready();
}

ServiceHarness::~ServiceHarness() {
    service_->stop();
    thread_.join();
}

std::unique_ptr<httplib::Client> ServiceHarness::client() const {
    auto c = std::make_unique<httplib::Client>("127.0.0.1", port_);
    c->set_read_timeout(std::chrono::seconds(10));
    return c;
}

}  // namespace testsupport

namespace testsupport {

using namespace uiminer;

std::string openssl_md5_hex(const std::string& data) {
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), out, &len, EVP_md5(), nullptr);
    std::string hex;
    char buf[3];
    for (unsigned i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", out[i]);
        hex += buf;
    }
    return hex;
}

// Independent repr: explicit stack walk.
std::string reference_repr(const vh::ViewTree& tree) {
    std::vector<const vh::ViewNode*> stack;
    for (auto it = tree.roots.rbegin(); it != tree.roots.rend(); ++it) stack.push_back(&*it);
    std::string out;
    int index = 0;
    while (!stack.empty()) {
        const auto* n = stack.back();
        stack.pop_back();
        if (index > 0) out += ';';
        out += std::to_string(index++) + "_" + std::to_string(noise::TypeIndexTable::standard().index_of(n->widget_class));
        for (auto it = n->children.rbegin(); it != n->children.rend(); ++it) stack.push_back(&*it);
    }
    return out;
}

}  // namespace testsupport

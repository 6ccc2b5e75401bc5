#pragma once

#include "uiminer/annotate/service.hpp"
#include "uiminer/device/action.hpp"
#include "uiminer/device/sim_app.hpp"
#include "uiminer/policy/policy.hpp"
#include "uiminer/store/dataset_store.hpp"
#include "uiminer/store/layout.hpp"
#include "uiminer/store/record.hpp"
#include "uiminer/vh/view_tree.hpp"

#include "httplib.h"

#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <thread>
#include <vector>

#ifndef UIMINER_FIXTURE_DIR
#define UIMINER_FIXTURE_DIR "fixtures"
#endif
#ifndef UIMINER_TEST_FIXTURE_DIR
#define UIMINER_TEST_FIXTURE_DIR "tests/fixtures"
#endif

namespace testsupport {

inline std::filesystem::path fixture(const std::string& rel) { return std::filesystem::path(UIMINER_FIXTURE_DIR) / rel; }
inline std::filesystem::path test_fixture(const std::string& rel) {
    return std::filesystem::path(UIMINER_TEST_FIXTURE_DIR) / rel;
}

std::string read_file(const std::filesystem::path& path);

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

uiminer::vh::ViewNode make_node(const std::string& cls, uiminer::vh::Rect bounds, const std::string& id = "",
                                const std::string& text = "", bool clickable = false);

// Tree of the given roots, renumbered.
uiminer::vh::ViewTree make_tree(std::vector<uiminer::vh::ViewNode> roots, int w = 1080, int h = 1920);

// Random tree with widget classes, ids, texts (including XML-special and
// non-ASCII characters), flags and nested bounds.
uiminer::vh::ViewTree random_tree(std::mt19937_64& rng, int max_nodes = 40);

// Random valid action with ids/values from the primitive grammar's alphabet.
uiminer::device::Action random_action(std::mt19937_64& rng);

// Pixel-level reference rasterizer: paints every leaf in draw order onto a
// full-resolution canvas, then samples the pixel under each cell centre.
uiminer::store::LayoutImage reference_layout(const uiminer::vh::ViewTree& tree, int grid_w, int grid_h);

// Screen whose pre-order type sequence encodes `variant`; distinct variants
// give distinct structural hashes. No node is covered by a later one.
uiminer::vh::ViewTree distinct_tree(int variant, const std::string& text = "");

struct InjectedCorpus {
    std::vector<uiminer::store::DatasetRecord> records;
    std::vector<uiminer::vh::ViewTree> trees;
    // record index -> index of the original it copies
    std::map<std::size_t, std::size_t> duplicate_of;
};

// `distinct` unique screens of one app plus `k` structural copies of earlier
// screens at random later positions. Copies differ in text only.
InjectedCorpus injected_corpus(int distinct, int k, std::uint64_t seed, const std::string& app_id = "com.test.app");

struct OverlayFixture {
    std::string name;
    uiminer::vh::ViewTree tree;
    bool occluded = false;
};

// Ten screens with an element fully under a later view, ten without.
std::vector<OverlayFixture> overlay_fixtures();

struct AblationTally {
    std::size_t entries = 0;
    std::size_t intended = 0;
    std::size_t primitive_hits = 0;
    std::size_t free_text_hits = 0;
};

// Replays tests/fixtures/ablation_replies.json: each entry's primitive reply
// goes through parse_reply and its free-text reply through parse_free_text
// on the same screen. A hit is an intended action found among the extracted
// steps (multiset intersection).
AblationTally run_ablation_corpus();

// Ingests `tree` as a capture (layout PNG as screenshot) and moves the new
// record to `status`, adding an auto flag when that status needs one.
uiminer::store::DatasetRecord store_screen(uiminer::store::DatasetStore& store, const uiminer::vh::ViewTree& tree,
                                           const std::string& app_id, std::int64_t captured_at,
                                           uiminer::store::RecordStatus status = uiminer::store::RecordStatus::Pending,
                                           const std::string& activity = "MainActivity");

// Ten validated records of one app built from random screens; the record at
// index 6 repeats the layout of the query at index 0 with different ids and
// texts of the same text-ness. Returns ids in insertion order.
std::vector<std::string> build_retrieval_corpus(uiminer::store::DatasetStore& store, std::uint64_t seed = 17);

// Annotation service on an ephemeral localhost port, served from a
// background thread for the lifetime of the object.
class ServiceHarness {
public:
    explicit ServiceHarness(std::shared_ptr<uiminer::store::DatasetStore> store,
                            uiminer::annotate::ServiceOptions options = {});
    ~ServiceHarness();
    int port() const { return port_; }
    std::unique_ptr<httplib::Client> client() const;

private:
    std::unique_ptr<uiminer::annotate::AnnotationService> service_;
    std::thread thread_;
    int port_ = -1;
};

// The bundled SimApp suite, sorted by app id.
std::vector<std::shared_ptr<const uiminer::device::SimApp>> load_suite();

// LLM policy over a scripted backend loaded from a rules file.
std::shared_ptr<const uiminer::policy::Policy> scripted_policy(const std::filesystem::path& rules,
                                                               const std::string& name = "scripted");

// Independent oracles for the structural hash.
std::string openssl_md5_hex(const std::string& data);
std::string reference_repr(const uiminer::vh::ViewTree& tree);

}  // namespace testsupport

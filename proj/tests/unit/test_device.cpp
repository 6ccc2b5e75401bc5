#include "uiminer/device/adb_driver.hpp"
#include "uiminer/device/sim_driver.hpp"
#include "uiminer/error.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <deque>
#include <regex>

using namespace uiminer;
using namespace uiminer::device;
using nlohmann::json;

namespace {

std::shared_ptr<const SimApp> load(const std::string& name) {
    return std::make_shared<const SimApp>(load_sim_app(testsupport::fixture(name)));
}

json email_app() {
    return json::parse(R"({
      "app_id": "com.test.signup", "initial_state": "form",
      "declared_activities": ["com.test.signup.FormActivity", "com.test.signup.DoneActivity"],
      "states": {
        "form": {"activity": "com.test.signup.FormActivity", "back": "<exit>",
                 "tree": {"class": "FrameLayout", "bounds": [0,0,1080,1920], "children": [
                   {"class": "EditText", "id": "email", "bounds": [40,200,1040,320]}]}},
        "done": {"activity": "com.test.signup.DoneActivity", "back": "form", "terminal": true,
                 "tree": {"class": "TextView", "text": "Thanks", "bounds": [0,0,1080,200]}}},
      "transitions": [
        {"from": "form", "to": "done",
         "match": {"kind": "input", "target": "email", "value_pattern": "[^@ ]+@[^@ ]+\\.[a-z]+"}}]
    })");
}

std::string fixture_error(const json& j) {
    try {
        sim_app_from_json(j);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::FixtureInvalid);
        return e.detail();
    }
    return "";
}

class RecordingRunner : public CommandRunner {
public:
    std::vector<std::vector<std::string>> calls;
    std::function<CommandResult(const std::vector<std::string>&)> respond;

    CommandResult run(const std::vector<std::string>& argv) override {
        calls.push_back(argv);
        return respond ? respond(argv) : CommandResult{};
    }

    static std::string joined(const std::vector<std::string>& argv) {
        std::string s;
        for (const auto& a : argv) s += (s.empty() ? "" : " ") + a;
        return s;
    }
};

const char* kDumpsysWindow =
    "  mCurrentFocus=Window{3f1c2a u0 com.example.mail/com.example.mail.ui.ComposeActivity}\n"
    "  mFocusedApp=ActivityRecord{9a8b7c u0 com.example.mail/.ui.ComposeActivity t12}\n";

// Fake device: dumps the 12-node fixture and reports the mail app focused.
std::function<CommandResult(const std::vector<std::string>&)> fake_device(const std::string& dump) {
    return [dump](const std::vector<std::string>& argv) {
        const auto s = RecordingRunner::joined(argv);
        CommandResult r;
        if (s.find("wm size") != std::string::npos) r.out = "Physical size: 1080x1920\n";
        else if (s.find("exec-out cat") != std::string::npos) r.out = dump;
        else if (s.find("screencap") != std::string::npos) r.out = "\x89PNG\r\n";
        else if (s.find("dumpsys window") != std::string::npos) r.out = kDumpsysWindow;
        else if (s.find("get-state") != std::string::npos) r.out = "device\n";
        else if (s.find("uiautomator dump") != std::string::npos) r.out = "UI hierchary dumped to: /sdcard/window_dump.xml\n";
        return r;
    };
}

// Driver whose successive captures come from a script of trees.
class ScriptedDriver : public Driver {
public:
    explicit ScriptedDriver(std::vector<vh::ViewTree> script) : script_(script.begin(), script.end()) {}
    const std::string& app_id() const override { return id_; }
    ScreenCapture capture() override {
        ScreenCapture c;
        c.tree = script_.front();
        if (script_.size() > 1) script_.pop_front();
        c.activity_name = "A";
        c.captured_at = clock_.now_ms();
        ++captures;
        return c;
    }
    ExecutionResult execute(const Action&) override { return {}; }
    void back() override {}
    void launch() override {}
    bool app_running() override { return true; }
    std::set<std::string> list_activities() override { return {"A"}; }
    util::Clock& clock() override { return clock_; }

    int captures = 0;

private:
    std::string id_ = "scripted";
    std::deque<vh::ViewTree> script_;
    util::ManualClock clock_;
};

vh::ViewTree one(const std::string& cls) {
    return testsupport::make_tree({testsupport::make_node(cls, {0, 0, 10, 10})});
}

}  // namespace

TEST(ActionModel, ValidateAndPrimitive) {
    EXPECT_EQ(validate(Action::tap("a")), "");
    EXPECT_NE(validate(Action::tap("")), "");
    EXPECT_NE(validate(Action::input("a", "")), "");
    Action bad = Action::scroll(Direction::Down);
    bad.target = "x";
    EXPECT_NE(validate(bad), "");
    Action no_dir{ActionKind::Scroll, {}, std::nullopt, {}};
    EXPECT_NE(validate(no_dir), "");
    EXPECT_EQ(to_primitive(Action::tap("login")), "[tap] [login]");
    EXPECT_EQ(to_primitive(Action::long_tap("x")), "[long-tap] [x]");
    EXPECT_EQ(to_primitive(Action::scroll(Direction::Up)), "[scroll] [up]");
    EXPECT_EQ(to_primitive(Action::input("email", "example@gmail.com")), "[input] [email] [example@gmail.com]");
    EXPECT_EQ(action_kind_from_string("TAP"), ActionKind::Tap);
    EXPECT_EQ(direction_from_string("Left"), Direction::Left);
    EXPECT_FALSE(direction_from_string("sideways"));
}

TEST(ActionModel, JsonRoundTrip) {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 200; ++i) {
        const auto a = testsupport::random_action(rng);
        EXPECT_EQ(action_from_json(to_json(a)), a);
    }
}

TEST(SimApp, LoadsBundledFixtures) {
    const auto compound = load("checkbox_compound.json");
    EXPECT_EQ(compound->declared_activities.size(), 3u);
    for (const auto& entry : std::filesystem::directory_iterator(testsupport::fixture("suite"))) {
        const auto name = entry.path().filename().string();
        if (name == "semantic.rules.json" || name == "apps.manifest.json") continue;
        EXPECT_NO_THROW(load_sim_app(entry.path())) << name;
    }
}

TEST(SimApp, RejectsInvariantViolations) {
    auto j = email_app();
    j["transitions"][0]["to"] = "nowhere";
    EXPECT_NE(fixture_error(j).find("transition endpoint"), std::string::npos);

    j = email_app();
    j["initial_state"] = "missing";
    EXPECT_NE(fixture_error(j).find("initial_state"), std::string::npos);

    j = email_app();
    j["states"]["done"]["activity"] = "com.test.signup.Undeclared";
    EXPECT_NE(fixture_error(j).find("activity_name"), std::string::npos);

    j = email_app();
    j["transitions"].push_back(j["transitions"][0]);
    EXPECT_NE(fixture_error(j).find("ambiguous transition"), std::string::npos);

    j = email_app();
    j["transitions"][0]["match"]["target"] = "not_on_screen";
    EXPECT_NE(fixture_error(j).find("matcher target"), std::string::npos);

    j = email_app();
    j["transitions"][0]["match"]["value_pattern"] = "(unclosed";
    EXPECT_NE(fixture_error(j).find("value_pattern"), std::string::npos);

    EXPECT_THROW(load_sim_app(testsupport::fixture("does_not_exist.json")), Error);
}

TEST(SimApp, DisjointGuardsAreNotAmbiguous) {
    EXPECT_NO_THROW(load("checkbox_compound.json"));
}

TEST(SimDriver, CaptureAndTransitions) {
    SimDriver d(load("chain3.json"), 5000);
    auto c = d.capture();
    EXPECT_EQ(c.activity_name, "com.uiminer.chain3.FirstActivity");
    EXPECT_EQ(c.captured_at, 5000);
    EXPECT_EQ(c.app_id, "com.uiminer.chain3");
    EXPECT_TRUE(vh::structurally_equal(c.tree, vh::parse_hierarchy(c.raw_dump, 1080, 1920)));
    EXPECT_FALSE(c.screenshot.empty());
    EXPECT_TRUE(d.execute(Action::tap("next_a")).applied);
    EXPECT_EQ(d.capture().activity_name, "com.uiminer.chain3.SecondActivity");
    EXPECT_EQ(d.list_activities(), d.app().declared_activities);
}

TEST(SimDriver, CheckboxGuard) {
    SimDriver d(load("checkbox_compound.json"));
    EXPECT_FALSE(d.execute(Action::tap("agree")).applied);
    EXPECT_EQ(d.current_state(), "terms");
    EXPECT_TRUE(d.execute(Action::tap("checkbox_policy")).applied);
    EXPECT_TRUE(d.flags().count("checked"));
    EXPECT_TRUE(d.execute(Action::tap("checkbox_policy")).applied);
    EXPECT_FALSE(d.flags().count("checked"));
    d.execute(Action::tap("checkbox_policy"));
    EXPECT_TRUE(d.execute(Action::tap("agree")).applied);
    EXPECT_EQ(d.capture().activity_name, "com.uiminer.compound.HomeActivity");
}

TEST(SimDriver, EmailValuePattern) {
    SimDriver d(std::make_shared<const SimApp>(sim_app_from_json(email_app())));
    EXPECT_FALSE(d.execute(Action::input("email", "test")).applied);
    EXPECT_EQ(d.current_state(), "form");
    EXPECT_TRUE(d.execute(Action::input("email", "example@gmail.com")).applied);
    EXPECT_EQ(d.current_state(), "done");
}

TEST(SimDriver, MissingTargetAndInvalidAction) {
    SimDriver d(load("chain3.json"));
    try {
        d.execute(Action::tap("nope"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TargetNotFound);
    }
    EXPECT_THROW(d.execute(Action::input("next_a", "")), Error);
    EXPECT_EQ(d.current_state(), "a");
}

TEST(SimDriver, ExitAndRelaunch) {
    SimDriver d(load("checkbox_compound.json"));
    EXPECT_TRUE(d.execute(Action::tap("decline")).applied);
    EXPECT_FALSE(d.app_running());
    EXPECT_THROW(d.capture(), Error);
    EXPECT_FALSE(d.execute(Action::scroll(Direction::Down)).applied);
    d.launch();
    EXPECT_TRUE(d.app_running());
    EXPECT_EQ(d.current_state(), "terms");
    d.back();
    EXPECT_FALSE(d.app_running());
}

TEST(SimDriver, DeterministicTrajectories) {
    const auto app = load("suite/com.uiminer.shop.json");
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        SimDriver a(app), b(app);
        for (int step = 0; step < 30; ++step) {
            const auto tree = a.capture().tree;
            const auto els = vh::interactive_elements(tree);
            Action act = Action::scroll(Direction::Down);
            std::vector<const vh::ViewNode*> ids;
            for (const auto* e : els) {
                if (!e->resource_id.empty()) ids.push_back(e);
            }
            if (!ids.empty() && rng() % 4) act = Action::tap(ids[rng() % ids.size()]->resource_id);
            const std::string before = a.current_state();
            const auto ra = a.execute(act);
            const auto rb = b.execute(act);
            EXPECT_EQ(ra.applied, rb.applied);
            EXPECT_EQ(a.current_state(), b.current_state());
            if (!ra.applied) {
                EXPECT_EQ(a.current_state(), before);
            }
            if (!a.app_running()) {
                a.launch();
                b.launch();
            }
        }
    }
}

TEST(WaitForRender, SimIsStableAfterFirstPair) {
    SimDriver d(load("chain3.json"));
    const auto r = wait_for_render(d, 2000, 2);
    EXPECT_TRUE(r.stable);
    EXPECT_EQ(r.captures_taken, 2);
    EXPECT_EQ(d.clock().now_ms(), 4000);
}

TEST(WaitForRender, ChangesOnceThenStabilises) {
    ScriptedDriver d({one("TextView"), one("Button")});
    const auto r = wait_for_render(d, 100, 2);
    EXPECT_TRUE(r.stable);
    EXPECT_EQ(r.captures_taken, 3);
}

TEST(WaitForRender, NoRetriesWithChangingDumps) {
    ScriptedDriver d({one("TextView"), one("Button"), one("ImageView")});
    const auto r = wait_for_render(d, 100, 0);
    EXPECT_FALSE(r.stable);
    EXPECT_EQ(r.captures_taken, 2);
}

TEST(WaitForRender, NeverStableRunsOutOfRetries) {
    ScriptedDriver d({one("TextView"), one("Button"), one("ImageView"), one("CheckBox"), one("Switch")});
    const auto r = wait_for_render(d, 0, 2);
    EXPECT_FALSE(r.stable);
    EXPECT_EQ(r.captures_taken, 4);
    EXPECT_THROW(wait_for_render(d, -1, 0), Error);
}

TEST(LoginHook, MatchesAndRuns) {
    SimDriver d(load("chain3.json"));
    LoginHook hook{"next_.*", {Action::tap("next_a"), Action::tap("next_b")}};
    const auto c = d.capture();
    EXPECT_TRUE(hook.matches(c.tree));
    const auto results = run_login_hook(d, hook, c);
    EXPECT_EQ(results.size(), 2u);
    EXPECT_EQ(d.current_state(), "c");
    EXPECT_FALSE((LoginHook{"login_.*", {}}.matches(c.tree)));
}

TEST(AdbHelpers, EscapeAndParse) {
    EXPECT_EQ(escape_input_text("hello world"), "hello%sworld");
    EXPECT_EQ(escape_input_text("a&b"), "a\\&b");
    EXPECT_EQ(escape_input_text("example@gmail.com"), "example@gmail.com");
    const auto f = parse_focused_activity(kDumpsysWindow);
    ASSERT_TRUE(f);
    EXPECT_EQ(f->first, "com.example.mail");
    EXPECT_EQ(f->second, "com.example.mail.ui.ComposeActivity");
    const auto rel = parse_focused_activity("mFocusedApp=ActivityRecord{1 u0 com.x/.Main t3}");
    ASSERT_TRUE(rel);
    EXPECT_EQ(rel->second, "com.x.Main");
    EXPECT_FALSE(parse_focused_activity("nothing here"));

    const std::string pkg =
        "Activity Resolver Table:\n  Non-Data Actions:\n      android.intent.action.MAIN:\n"
        "        4f2 com.x/.Main filter 1\n        5a1 com.x/com.x.settings.SettingsActivity filter 2\n"
        "        7b3 com.other/.Main filter 3\n";
    EXPECT_EQ(parse_package_activities(pkg, "com.x"),
              (std::set<std::string>{"com.x.Main", "com.x.settings.SettingsActivity"}));
}

TEST(AdbDriver, CaptureReplaysRecordedDump) {
    const auto dump = testsupport::read_file(testsupport::test_fixture("dump_12.xml"));
    auto runner = std::make_shared<RecordingRunner>();
    runner->respond = fake_device(dump);
    AdbDriver d({"/opt/adb", "emulator-5554", "com.example.mail"}, runner, std::make_shared<util::ManualClock>(77));
    d.connect();
    const auto c = d.capture();
    // Independent count: one node per "<node " occurrence in the raw dump.
    std::size_t expected = 0;
    for (auto pos = dump.find("<node "); pos != std::string::npos; pos = dump.find("<node ", pos + 1)) ++expected;
    EXPECT_EQ(c.tree.node_count(), expected);
    EXPECT_EQ(c.activity_name, "com.example.mail.ui.ComposeActivity");
    EXPECT_EQ(c.captured_at, 77);
    EXPECT_EQ(runner->calls.front(), (std::vector<std::string>{"/opt/adb", "-s", "emulator-5554", "get-state"}));
    EXPECT_TRUE(d.app_running());
}

TEST(AdbDriver, InputCommands) {
    const auto dump = testsupport::read_file(testsupport::test_fixture("dump_12.xml"));
    auto runner = std::make_shared<RecordingRunner>();
    runner->respond = fake_device(dump);
    AdbDriver d({"adb", "", "com.example.mail"}, runner);
    d.capture();

    runner->calls.clear();
    EXPECT_TRUE(d.execute(Action::tap("com.example.mail:id/back")).applied);
    EXPECT_EQ(RecordingRunner::joined(runner->calls.at(0)), "adb shell input tap 72 96");

    runner->calls.clear();
    d.execute(Action::long_tap("com.example.mail:id/help"));
    EXPECT_EQ(RecordingRunner::joined(runner->calls.at(0)), "adb shell input swipe 1008 96 1008 96 600");

    runner->calls.clear();
    d.execute(Action::scroll(Direction::Down));
    EXPECT_EQ(RecordingRunner::joined(runner->calls.at(0)), "adb shell input swipe 540 1440 540 480 300");

    // Email has text "Email": focus, move to end, delete five chars, type.
    runner->calls.clear();
    d.execute(Action::input("com.example.mail:id/email", "a b"));
    ASSERT_EQ(runner->calls.size(), 4u);
    EXPECT_EQ(RecordingRunner::joined(runner->calls[0]), "adb shell input tap 540 288");
    EXPECT_EQ(RecordingRunner::joined(runner->calls[1]), "adb shell input keyevent KEYCODE_MOVE_END");
    EXPECT_EQ(std::count(runner->calls[2].begin(), runner->calls[2].end(), "KEYCODE_DEL"), 5);
    EXPECT_EQ(RecordingRunner::joined(runner->calls[3]), "adb shell input text a%sb");

    runner->calls.clear();
    d.back();
    EXPECT_EQ(RecordingRunner::joined(runner->calls.at(0)), "adb shell input keyevent 4");
}

TEST(AdbDriver, NoCommandWhenPreconditionsFail) {
    const auto dump = testsupport::read_file(testsupport::test_fixture("dump_12.xml"));
    auto runner = std::make_shared<RecordingRunner>();
    runner->respond = fake_device(dump);
    AdbDriver d({"adb", "", "com.example.mail"}, runner);
    d.capture();
    runner->calls.clear();
    EXPECT_THROW(d.execute(Action::input("com.example.mail:id/email", "")), Error);
    EXPECT_THROW(d.execute(Action::tap("com.example.mail:id/absent")), Error);
    EXPECT_TRUE(runner->calls.empty());
}

TEST(AdbDriver, DeviceErrors) {
    auto runner = std::make_shared<RecordingRunner>();
    runner->respond = [](const std::vector<std::string>&) {
        return CommandResult{1, "", "error: no devices/emulators found", false, false};
    };
    AdbDriver d({"adb", "", "com.example.mail"}, runner);
    try {
        d.connect();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DeviceUnavailable);
    }
    runner->respond = [](const std::vector<std::string>& argv) {
        CommandResult r;
        if (RecordingRunner::joined(argv).find("wm size") != std::string::npos) r.out = "Physical size: 1080x1920";
        if (RecordingRunner::joined(argv).find("exec-out cat") != std::string::npos) r.out = "";
        return r;
    };
    try {
        d.capture();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DumpFailed);
    }
    runner->respond = [](const std::vector<std::string>&) { return CommandResult{0, "", "", true, false}; };
    AdbDriver missing({"/nonexistent/adb", "", "p"}, runner);
    EXPECT_THROW(missing.connect(), Error);
}

TEST(AdbDriver, ManifestUnavailable) {
    auto runner = std::make_shared<RecordingRunner>();
    runner->respond = [](const std::vector<std::string>&) { return CommandResult{0, "Unable to find package", ""}; };
    AdbDriver d({"adb", "", "com.none"}, runner);
    try {
        d.list_activities();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ManifestUnavailable);
    }
}

TEST(ProcessRunner, RunsAndCaptures) {
    ProcessRunner runner(std::chrono::milliseconds(5000));
    const auto ok = runner.run({"/bin/sh", "-c", "echo out; echo err >&2; exit 3"});
    EXPECT_EQ(ok.exit_code, 3);
    EXPECT_EQ(ok.out, "out\n");
    EXPECT_EQ(ok.err, "err\n");
    EXPECT_TRUE(runner.run({"/nonexistent/binary"}).spawn_failed);
    ProcessRunner quick(std::chrono::milliseconds(200));
    EXPECT_TRUE(quick.run({"/bin/sleep", "5"}).timed_out);
}

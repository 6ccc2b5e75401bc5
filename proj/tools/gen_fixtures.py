#!/usr/bin/env python3
"""Generates the simulated app suite under fixtures/suite/.

Each app is a small state machine whose screens are laid out as a vertical
stack of widgets. The semantic rules file maps a screen-unique resource id to
the reply a competent model would give on that screen.
"""
import json
import os
import sys

W, H = 1080, 1920
PKG_WIDGET = {"button", "edit", "check", "text", "list", "item", "image"}


def node(cls, bounds, **kw):
    n = {"class": cls, "bounds": list(bounds)}
    for key in ("id", "text", "desc"):
        if kw.get(key):
            n[key] = kw[key]
    for key in ("clickable", "long_clickable", "scrollable"):
        if kw.get(key):
            n[key] = True
    if kw.get("children"):
        n["children"] = kw["children"]
    return n


def widget(entry, top):
    kind = entry[0]
    box = (60, top, 1020, top + 140)
    if kind == "button":
        return node("Button", box, id=entry[1], text=entry[2], clickable=True), 160
    if kind == "edit":
        return node("EditText", box, id=entry[1], text=entry[2], clickable=True), 160
    if kind == "check":
        return node("CheckBox", box, id=entry[1], text=entry[2], clickable=True), 160
    if kind == "text":
        return node("TextView", box, text=entry[1]), 160
    if kind == "image":
        return node("ImageView", box, id=entry[1], desc=entry[2], clickable=True, long_clickable=True), 160
    if kind == "item":
        return node("TextView", box, id=entry[1], text=entry[2], clickable=True, long_clickable=True), 160
    if kind == "list":
        rows = []
        for i, label in enumerate(entry[2]):
            rows.append(node("TextView", (60, top + 20 + i * 120, 1020, top + 120 + i * 120), text=label))
        height = 40 + 120 * len(entry[2])
        return node("ListView", (0, top, W, top + height), id=entry[1], scrollable=True, children=rows), height + 20
    raise ValueError(kind)


def screen_tree(title, widgets, pad):
    children = [node("TextView", (60, 40, 1020, 160), text=title)]
    top = 200
    for entry in widgets:
        w, h = widget(entry, top)
        children.append(w)
        top += h
    for i in range(pad):
        children.append(node("View", (0, 1800 + i * 10, W, 1805 + i * 10)))
    return node("FrameLayout", (0, 0, W, H), children=children)


def type_sequence(tree):
    out = [tree["class"]]
    for c in tree.get("children", []):
        out.extend(type_sequence(c))
    return tuple(out)


class App:
    def __init__(self, app_id, category, rating, installs):
        self.app_id = app_id
        self.category = category
        self.rating = rating
        self.installs = installs
        self.declared = []
        self.states = {}
        self.order = []
        self.transitions = []
        self.rules = []

    def act(self, short):
        return f"{self.app_id}.{short}"

    def declare(self, *shorts):
        for s in shorts:
            if self.act(s) not in self.declared:
                self.declared.append(self.act(s))

    def screen(self, name, activity, title, widgets, back=None, key=None, reply=None):
        self.declare(activity)
        self.states[name] = {"activity": self.act(activity), "title": title, "widgets": widgets, "back": back}
        self.order.append(name)
        if reply is not None:
            self.rules.append({"contains": f"id={key} ", "reply": reply})

    def tap(self, src, target, dst, requires=(), forbids=(), sets=(), clears=(), kind="tap"):
        t = {"from": src, "to": dst, "match": {"kind": kind, "target": target}}
        if requires or forbids:
            t["guard"] = {"requires": list(requires), "forbids": list(forbids)}
        if sets:
            t["set"] = list(sets)
        if clears:
            t["clear"] = list(clears)
        self.transitions.append(t)

    def long_tap(self, src, target, dst, **kw):
        self.tap(src, target, dst, kind="long-tap", **kw)

    def scroll(self, src, direction, dst):
        self.transitions.append({"from": src, "to": dst, "match": {"kind": "scroll", "direction": direction}})

    def input(self, src, target, pattern, flag):
        self.transitions.append({"from": src, "to": src,
                                 "match": {"kind": "input", "target": target, "value_pattern": pattern},
                                 "set": [flag]})

    def to_json(self):
        seen = {}
        states = {}
        for name in self.order:
            s = self.states[name]
            pad = 0
            while True:
                tree = screen_tree(s["title"], s["widgets"], pad)
                seq = type_sequence(tree)
                if seq not in seen:
                    seen[seq] = name
                    break
                pad += 1
            st = {"activity": s["activity"], "tree": tree}
            if s["back"]:
                st["back"] = s["back"]
            states[name] = st
        return {
            "app_id": self.app_id,
            "initial_state": self.order[0],
            "screen": {"width": W, "height": H},
            "declared_activities": self.declared,
            "states": states,
            "transitions": self.transitions,
        }


EMAIL = r"[^@\s]+@[^@\s]+\.[A-Za-z]{2,}"


def mail():
    a = App("com.uiminer.mail", "Communication", 4.1, 5000000)
    a.screen("welcome", "WelcomeActivity", "Welcome to Postbox",
             [("text", "Fast, private email"), ("button", "btn_get_started", "Get started")],
             back="<exit>", key="btn_get_started", reply="1. [tap] [btn_get_started]")
    a.screen("signup", "SignupActivity", "Create your account",
             [("edit", "signup_email", "Email"), ("edit", "signup_password", "Password"),
              ("button", "btn_create_account", "Create account")],
             back="welcome", key="signup_email",
             reply="1. [input] [signup_email] [example@gmail.com]\n2. [input] [signup_password] [Str0ng!pass]\n"
                   "3. [tap] [btn_create_account]")
    a.screen("inbox", "InboxActivity", "Inbox",
             [("list", "inbox_list", ["Team sync", "Invoice #42", "Weekend plans"]),
              ("button", "btn_compose", "Compose"), ("button", "btn_open_settings", "Settings")],
             back="<exit>", key="btn_compose", reply="[tap] [btn_compose]")
    a.screen("compose", "ComposeActivity", "New message",
             [("edit", "compose_to", "To"), ("edit", "compose_body", "Message"), ("button", "btn_send", "Send")],
             back="inbox", key="compose_to",
             reply="1. [input] [compose_to] [friend@example.com]\n2. [input] [compose_body] [See you at noon]\n"
                   "3. [tap] [btn_send]")
    a.screen("sent", "SentActivity", "Message sent",
             [("text", "Your message is on its way"), ("button", "btn_sent_settings", "Mail settings")],
             back="inbox", key="btn_sent_settings", reply="[tap] [btn_sent_settings]")
    a.screen("settings", "SettingsActivity", "Settings",
             [("check", "chk_notifications", "Notifications"), ("button", "btn_about", "About")],
             back="inbox", key="chk_notifications", reply="[tap] [btn_about]")
    a.screen("about", "AboutActivity", "About Postbox", [("text", "Version 3.2.1")], back="settings")
    a.declare("SpamReportActivity")
    a.tap("welcome", "btn_get_started", "signup")
    a.input("signup", "signup_email", EMAIL, "email_ok")
    a.input("signup", "signup_password", r".{8,}", "password_ok")
    a.tap("signup", "btn_create_account", "inbox", requires=["email_ok", "password_ok"])
    a.tap("inbox", "btn_compose", "compose")
    a.tap("inbox", "btn_open_settings", "settings")
    a.input("compose", "compose_to", EMAIL, "to_ok")
    a.tap("compose", "btn_send", "sent", requires=["to_ok"])
    a.tap("sent", "btn_sent_settings", "settings")
    a.tap("settings", "btn_about", "about")
    return a


def policy_agree():
    a = App("com.uiminer.notes", "Productivity", 4.5, 1000000)
    a.screen("splash", "SplashActivity", "Notes",
             [("text", "Your ideas, organised"), ("button", "btn_continue", "Continue")],
             back="<exit>", key="btn_continue", reply="[tap] [btn_continue]")
    a.screen("terms", "TermsActivity", "Privacy policy",
             [("text", "Please read and accept our privacy policy"),
              ("check", "checkbox_policy", "I have read the privacy policy"),
              ("button", "agree", "Agree"), ("button", "decline", "Decline")],
             back="splash", key="checkbox_policy", reply="[tap] [checkbox_policy], [tap] [agree]")
    a.screen("home", "HomeActivity", "All notes",
             [("list", "notes_list", ["Groceries", "Book ideas"]), ("image", "profile_avatar", "Profile"),
              ("button", "btn_new_note", "New note")],
             back="<exit>", key="btn_new_note", reply="1. [tap] [btn_new_note]")
    a.screen("editor", "EditorActivity", "New note",
             [("edit", "note_title", "Title"), ("edit", "note_body", "Start typing"),
              ("button", "btn_save_note", "Save")],
             back="home", key="note_title",
             reply="1. [input] [note_title] [Trip]\n2. [input] [note_body] [Pack the tent]\n3. [tap] [btn_save_note]")
    a.screen("saved", "NoteViewActivity", "Trip",
             [("text", "Pack the tent"), ("image", "note_avatar", "Account")],
             back="home", key="note_avatar", reply="[long-tap] [note_avatar]")
    a.screen("profile", "ProfileActivity", "Your profile",
             [("edit", "display_name", "Display name"), ("button", "btn_save_profile", "Save")],
             back="home", key="display_name",
             reply="1. [input] [display_name] [Alex Kim]\n2. [tap] [btn_save_profile]")
    a.screen("help", "HelpActivity", "Help centre", [("text", "Contact support@notes.example")], back="home")
    a.tap("splash", "btn_continue", "terms")
    a.tap("terms", "checkbox_policy", "terms", forbids=["policy_checked"], sets=["policy_checked"])
    a.tap("terms", "checkbox_policy", "terms", requires=["policy_checked"], clears=["policy_checked"])
    a.tap("terms", "agree", "home", requires=["policy_checked"])
    a.tap("terms", "decline", "<exit>")
    a.tap("home", "btn_new_note", "editor")
    a.long_tap("home", "profile_avatar", "profile")
    a.input("editor", "note_title", r".+", "title_ok")
    a.tap("editor", "btn_save_note", "saved", requires=["title_ok"])
    a.long_tap("saved", "note_avatar", "profile")
    a.input("profile", "display_name", r"[A-Za-z][A-Za-z ]+ [A-Za-z]+", "name_ok")
    a.tap("profile", "btn_save_profile", "help", requires=["name_ok"])
    return a


def quiz_fr():
    a = App("com.uiminer.quiz.fr", "Education", 4.3, 500000)
    a.screen("accueil", "AccueilActivity", "Quiz de géographie",
             [("text", "Testez vos connaissances"), ("button", "btn_commencer", "Commencer")],
             back="<exit>", key="btn_commencer", reply="[tap] [btn_commencer]")
    a.screen("question", "QuestionActivity", "Question 1",
             [("text", "Quelle est la capitale de la France ?"), ("edit", "champ_reponse", "Votre réponse"),
              ("button", "btn_valider", "Valider")],
             back="accueil", key="champ_reponse",
             reply="1. [input] [champ_reponse] [Paris]\n2. [tap] [btn_valider]")
    a.screen("resultat", "ResultatActivity", "Bonne réponse !",
             [("text", "Score : 1/1"), ("button", "btn_niveau_suivant", "Niveau suivant")],
             back="accueil", key="btn_niveau_suivant", reply="[tap] [btn_niveau_suivant]")
    a.screen("niveau2", "Niveau2Activity", "Question 2",
             [("text", "Quel fleuve traverse Lyon ?"), ("button", "choix_a", "La Loire"),
              ("button", "choix_b", "Le Rhône"), ("button", "choix_c", "La Garonne")],
             back="resultat", key="choix_b", reply="2) [tap] [choix_b]")
    a.screen("bravo", "BravoActivity", "Bravo !",
             [("text", "Vous avez terminé le quiz"), ("button", "btn_classement", "Voir le classement")],
             back="accueil", key="btn_classement", reply="[tap] [btn_classement]")
    a.screen("echec", "EchecActivity", "Dommage", [("text", "Mauvaise réponse"), ("button", "btn_reessayer", "Réessayer")],
             back="niveau2", key="btn_reessayer", reply="[tap] [btn_reessayer]")
    a.screen("classement", "ClassementActivity", "Classement",
             [("list", "liste_classement", ["1. Marie", "2. Louis", "3. Vous"])], back="bravo")
    a.declare("ParametresActivity")
    a.tap("accueil", "btn_commencer", "question")
    a.input("question", "champ_reponse", r"\s*[Pp]aris\s*", "reponse_ok")
    a.tap("question", "btn_valider", "resultat", requires=["reponse_ok"])
    a.tap("resultat", "btn_niveau_suivant", "niveau2")
    a.tap("niveau2", "choix_a", "echec")
    a.tap("niveau2", "choix_b", "bravo")
    a.tap("niveau2", "choix_c", "echec")
    a.tap("echec", "btn_reessayer", "niveau2")
    a.tap("bravo", "btn_classement", "classement")
    return a


def quiz_zh():
    a = App("com.uiminer.quiz.zh", "Education", 4.0, 2000000)
    a.screen("home", "HomeActivity", "地理知识竞赛",
             [("text", "每天一道题"), ("button", "btn_kaishi", "开始答题")],
             back="<exit>", key="btn_kaishi", reply="[tap] [btn_kaishi]")
    a.screen("question", "QuestionActivity", "第一题",
             [("text", "中国的首都是哪里？"), ("edit", "answer_field", "请输入答案"), ("button", "btn_tijiao", "提交")],
             back="home", key="answer_field", reply="1. [input] [answer_field] [北京]\n2. [tap] [btn_tijiao]")
    a.screen("result", "ResultActivity", "回答正确",
             [("text", "得分 10"), ("button", "btn_paihang", "排行榜"), ("button", "btn_fenxiang", "分享")],
             back="home", key="btn_paihang", reply="[tap] [btn_paihang]")
    a.screen("leaderboard", "LeaderboardActivity", "排行榜",
             [("list", "paihang_list", ["张伟 120", "李娜 110", "王芳 95"])],
             back="result", key="paihang_list", reply="[scroll] [down]")
    a.screen("leaderboard_more", "LeaderboardActivity", "排行榜（更多）",
             [("list", "paihang_list_more", ["刘洋 80", "陈静 75"]), ("button", "btn_profile_me", "我的主页")],
             back="result", key="btn_profile_me", reply="[tap] [btn_profile_me]")
    a.screen("me", "ProfileActivity", "我的主页", [("text", "已答题 1 道"), ("button", "btn_shezhi", "设置")],
             back="leaderboard_more", key="btn_shezhi", reply="[tap] [btn_shezhi]")
    a.screen("settings", "SettingsActivity", "设置", [("check", "chk_yejian", "夜间模式")], back="me")
    a.screen("share", "ShareActivity", "分享", [("text", "分享到朋友圈")], back="result")
    a.tap("home", "btn_kaishi", "question")
    a.input("question", "answer_field", r"\s*北京\s*", "answer_ok")
    a.tap("question", "btn_tijiao", "result", requires=["answer_ok"])
    a.tap("result", "btn_paihang", "leaderboard")
    a.tap("result", "btn_fenxiang", "share")
    a.scroll("leaderboard", "down", "leaderboard_more")
    a.scroll("leaderboard_more", "up", "leaderboard")
    a.tap("leaderboard_more", "btn_profile_me", "me")
    a.tap("me", "btn_shezhi", "settings")
    return a


def login():
    a = App("com.uiminer.social", "Social", 3.9, 10000000)
    a.screen("login", "LoginActivity", "Sign in",
             [("edit", "username", "Username"), ("edit", "password", "Password"), ("button", "btn_login", "Log in"),
              ("button", "btn_forgot", "Forgot password?")],
             back="<exit>", key="username",
             reply="1. [input] [username] [alexkim]\n2. [input] [password] [Sup3r$ecret]\n3. [tap] [btn_login]")
    a.screen("forgot", "ForgotPasswordActivity", "Reset password",
             [("edit", "reset_email", "Email"), ("button", "btn_reset", "Send link")],
             back="login", key="reset_email", reply="[input] [reset_email] [alex@example.com] [tap] [btn_reset]")
    a.screen("feed", "FeedActivity", "Home feed",
             [("item", "post_item", "Alex: hiking this weekend?"), ("button", "btn_messages", "Messages")],
             back="<exit>", key="post_item", reply="[long-tap] [post_item]")
    a.screen("post_menu", "PostMenuActivity", "Post options",
             [("button", "btn_report", "Report"), ("button", "btn_hide", "Hide post")],
             back="feed", key="btn_report", reply="[tap] [btn_report]")
    a.screen("report", "ReportActivity", "Report post",
             [("check", "reason_spam", "Spam"), ("button", "btn_submit_report", "Submit")],
             back="feed", key="reason_spam", reply="1. [tap] [reason_spam]\n2. [tap] [btn_submit_report]")
    a.screen("thanks", "ReportThanksActivity", "Thanks for reporting",
             [("button", "btn_back_messages", "Go to messages")],
             back="feed", key="btn_back_messages", reply="[tap] [btn_back_messages]")
    a.screen("messages", "MessagesActivity", "Messages", [("list", "thread_list", ["Sam", "Jo"])], back="feed")
    a.tap("login", "btn_forgot", "forgot")
    a.input("login", "username", r"[a-z]{3,}", "user_ok")
    a.input("login", "password", r".{8,}", "pass_ok")
    a.tap("login", "btn_login", "feed", requires=["user_ok", "pass_ok"])
    a.long_tap("feed", "post_item", "post_menu")
    a.tap("feed", "btn_messages", "messages")
    a.tap("post_menu", "btn_report", "report")
    a.tap("post_menu", "btn_hide", "feed")
    a.tap("report", "reason_spam", "report", forbids=["reason"], sets=["reason"])
    a.tap("report", "btn_submit_report", "thanks", requires=["reason"])
    a.tap("thanks", "btn_back_messages", "messages")
    return a


def shop():
    a = App("com.uiminer.shop", "Shopping", 4.2, 50000000)
    a.screen("home", "HomeActivity", "Shop",
             [("edit", "search_box", "Search products"), ("button", "btn_search", "Search")],
             back="<exit>", key="search_box", reply="1. [input] [search_box] [headphones]\n2. [tap] [btn_search]")
    a.screen("results", "SearchResultsActivity", "Results",
             [("list", "results_list", ["Phone case", "Charger", "Cable"])],
             back="home", key="results_list", reply="[scroll] [down]")
    a.screen("results_more", "SearchResultsActivity", "Results (page 2)",
             [("item", "item_headphones", "Wireless headphones"), ("list", "results_list_more", ["Speaker"])],
             back="home", key="item_headphones", reply="[tap] [item_headphones]")
    a.screen("product", "ProductActivity", "Wireless headphones",
             [("text", "$59.00"), ("button", "btn_add_cart", "Add to cart")],
             back="results_more", key="btn_add_cart", reply="[tap] [btn_add_cart]")
    a.screen("cart", "CartActivity", "Cart", [("text", "1 item"), ("button", "btn_checkout", "Checkout")],
             back="product", key="btn_checkout", reply="[tap] [btn_checkout]")
    a.screen("checkout", "CheckoutActivity", "Payment",
             [("edit", "card_number", "Card number"), ("button", "btn_pay", "Pay now")],
             back="cart", key="card_number", reply="1. [input] [card_number] [4111111111111111]\n2. [tap] [btn_pay]")
    a.screen("confirmation", "OrderConfirmationActivity", "Order placed", [("text", "Order #1001")], back="home")
    a.declare("WishlistActivity")
    a.input("home", "search_box", r".+", "query_ok")
    a.tap("home", "btn_search", "results", requires=["query_ok"])
    a.scroll("results", "down", "results_more")
    a.scroll("results_more", "up", "results")
    a.tap("results_more", "item_headphones", "product")
    a.tap("product", "btn_add_cart", "cart")
    a.tap("cart", "btn_checkout", "checkout")
    a.input("checkout", "card_number", r"\d{16}", "card_ok")
    a.tap("checkout", "btn_pay", "confirmation", requires=["card_ok"])
    return a


def bank():
    a = App("com.uiminer.bank", "Finance", 4.6, 10000000)
    a.screen("pin", "PinActivity", "Enter PIN",
             [("edit", "pin_field", "4-digit PIN"), ("button", "btn_unlock", "Unlock")],
             back="<exit>", key="pin_field", reply="1. [input] [pin_field] [2580]\n2. [tap] [btn_unlock]")
    a.screen("accounts", "AccountsActivity", "Accounts",
             [("item", "account_checking", "Checking  $1,204.33"), ("item", "account_savings", "Savings  $8,000.00")],
             back="<exit>", key="account_checking", reply="[tap] [account_checking]")
    a.screen("transactions", "TransactionsActivity", "Checking",
             [("list", "txn_list", ["Coffee -4.50", "Salary +2,400.00"]), ("button", "btn_transfer", "Transfer")],
             back="accounts", key="btn_transfer", reply="[tap] [btn_transfer]")
    a.screen("transfer", "TransferActivity", "Transfer money",
             [("edit", "amount_field", "Amount"), ("button", "btn_confirm", "Confirm")],
             back="transactions", key="amount_field", reply="1. [input] [amount_field] [25]\n2. [tap] [btn_confirm]")
    a.screen("done", "TransferDoneActivity", "Transfer complete",
             [("button", "btn_statements", "View statements")],
             back="accounts", key="btn_statements", reply="[tap] [btn_statements]")
    a.screen("statements", "StatementsActivity", "Statements", [("list", "stmt_list", ["March", "April"])],
             back="accounts")
    a.screen("savings", "SavingsActivity", "Savings", [("text", "Interest 2.1%")], back="accounts")
    a.input("pin", "pin_field", r"\d{4}", "pin_ok")
    a.tap("pin", "btn_unlock", "accounts", requires=["pin_ok"])
    a.tap("accounts", "account_checking", "transactions")
    a.tap("accounts", "account_savings", "savings")
    a.tap("transactions", "btn_transfer", "transfer")
    a.input("transfer", "amount_field", r"\d{1,5}", "amount_ok")
    a.tap("transfer", "btn_confirm", "done", requires=["amount_ok"])
    a.tap("done", "btn_statements", "statements")
    return a


def wizard():
    a = App("com.uiminer.budget", "Finance", 4.4, 100000)
    a.screen("step1", "SetupStepOneActivity", "Welcome (1/3)",
             [("check", "accept_terms", "I accept the terms of service"), ("button", "btn_next_1", "Next")],
             back="<exit>", key="accept_terms", reply="1. [tap] [accept_terms]\n2. [tap] [btn_next_1]")
    a.screen("step2", "SetupStepTwoActivity", "Your name (2/3)",
             [("edit", "setup_name", "Name"), ("button", "btn_next_2", "Next")],
             back="step1", key="setup_name", reply="1. [input] [setup_name] [Alex]\n2. [tap] [btn_next_2]")
    a.screen("step3", "SetupStepThreeActivity", "Monthly budget (3/3)",
             [("edit", "budget_amount", "Amount"), ("button", "btn_finish", "Finish")],
             back="step2", key="budget_amount", reply="1. [input] [budget_amount] [1500]\n2. [tap] [btn_finish]")
    a.screen("main", "MainActivity", "Budget",
             [("item", "category_food", "Food  $320 / $400"), ("button", "btn_add_expense", "Add expense")],
             back="<exit>", key="btn_add_expense", reply="[tap] [btn_add_expense]")
    a.screen("expense", "AddExpenseActivity", "Add expense",
             [("edit", "expense_amount", "Amount"), ("edit", "expense_note", "Note"), ("button", "btn_save_expense", "Save")],
             back="main", key="expense_amount",
             reply="1. [input] [expense_amount] [12]\n2. [input] [expense_note] [Lunch]\n3. [tap] [btn_save_expense]")
    a.screen("report", "ReportActivity", "Spending report", [("list", "report_list", ["Food 80%", "Transport 20%"])],
             back="main")
    a.declare("ExportActivity")
    a.tap("step1", "accept_terms", "step1", forbids=["terms"], sets=["terms"])
    a.tap("step1", "accept_terms", "step1", requires=["terms"], clears=["terms"])
    a.tap("step1", "btn_next_1", "step2", requires=["terms"])
    a.input("step2", "setup_name", r"[A-Za-z]{2,}", "name_ok")
    a.tap("step2", "btn_next_2", "step3", requires=["name_ok"])
    a.input("step3", "budget_amount", r"\d{2,6}", "budget_ok")
    a.tap("step3", "btn_finish", "main", requires=["budget_ok"])
    a.tap("main", "btn_add_expense", "expense")
    a.input("expense", "expense_amount", r"\d{1,6}", "exp_ok")
    a.tap("expense", "btn_save_expense", "report", requires=["exp_ok"])
    return a


def news_ja():
    a = App("com.uiminer.news.ja", "News", 4.0, 5000000)
    a.screen("top", "TopActivity", "ニュース",
             [("item", "article_1", "新しい駅が開業"), ("button", "btn_tab_world", "国際")],
             back="<exit>", key="article_1", reply="[tap] [article_1]")
    a.screen("consent", "ConsentActivity", "利用規約",
             [("text", "記事を読むには同意が必要です"), ("check", "chk_doui", "同意する"), ("button", "btn_ok", "OK")],
             back="top", key="chk_doui", reply="1. [tap] [chk_doui]\n2. [tap] [btn_ok]")
    a.screen("article", "ArticleActivity", "新しい駅が開業",
             [("text", "本日、新しい駅が開業しました。"), ("image", "article_image", "駅の写真"),
              ("button", "btn_comments", "コメント")],
             back="top", key="btn_comments", reply="[tap] [btn_comments]")
    a.screen("comments", "CommentsActivity", "コメント",
             [("edit", "comment_field", "コメントを書く"), ("button", "btn_post", "投稿")],
             back="article", key="comment_field", reply="1. [input] [comment_field] [楽しみです]\n2. [tap] [btn_post]")
    a.screen("posted", "CommentPostedActivity", "投稿しました",
             [("button", "btn_bookmarks", "ブックマーク")],
             back="article", key="btn_bookmarks", reply="[tap] [btn_bookmarks]")
    a.screen("bookmarks", "BookmarksActivity", "ブックマーク", [("list", "bm_list", ["新しい駅が開業"])], back="top")
    a.screen("world", "WorldActivity", "国際ニュース", [("list", "world_list", ["首脳会談", "為替"])], back="top")
    a.tap("top", "article_1", "consent")
    a.tap("top", "btn_tab_world", "world")
    a.tap("consent", "chk_doui", "consent", forbids=["doui"], sets=["doui"])
    a.tap("consent", "btn_ok", "article", requires=["doui"])
    a.tap("article", "btn_comments", "comments")
    a.input("comments", "comment_field", r"[^\x00-\x7F].*", "comment_ok")
    a.tap("comments", "btn_post", "posted", requires=["comment_ok"])
    a.tap("posted", "btn_bookmarks", "bookmarks")
    return a


def fitness():
    a = App("com.uiminer.fitness", "Health & Fitness", 4.7, 1000000)
    a.screen("onboarding", "OnboardingActivity", "About you",
             [("edit", "age_field", "Age"), ("edit", "weight_field", "Weight (kg)"), ("button", "btn_onboard_next", "Next")],
             back="<exit>", key="age_field",
             reply="1. [input] [age_field] [34]\n2. [input] [weight_field] [70]\n3. [tap] [btn_onboard_next]")
    a.screen("dashboard", "DashboardActivity", "Today",
             [("text", "Steps 4,210"), ("button", "btn_start_workout", "Start workout"),
              ("button", "btn_history", "History")],
             back="<exit>", key="btn_start_workout", reply="[tap] [btn_start_workout]")
    a.screen("workout", "WorkoutActivity", "Running",
             [("text", "00:12:40"), ("button", "btn_stop", "Hold to stop")],
             back="dashboard", key="btn_stop", reply="[long-tap] [btn_stop]")
    a.screen("summary", "WorkoutSummaryActivity", "Great job!",
             [("text", "2.1 km"), ("button", "btn_rate", "Rate workout")],
             back="dashboard", key="btn_rate", reply="[tap] [btn_rate]")
    a.screen("rate", "RateWorkoutActivity", "How did it feel?",
             [("edit", "rating_note", "Notes"), ("button", "btn_rate_done", "Done")],
             back="summary", key="rating_note", reply="1. [input] [rating_note] [Felt strong]\n2. [tap] [btn_rate_done]")
    a.screen("history", "HistoryActivity", "History", [("list", "history_list", ["Mon 5 km", "Wed 3 km"])],
             back="dashboard")
    a.declare("SubscriptionActivity")
    a.input("onboarding", "age_field", r"\d{1,3}", "age_ok")
    a.input("onboarding", "weight_field", r"\d{2,3}", "weight_ok")
    a.tap("onboarding", "btn_onboard_next", "dashboard", requires=["age_ok", "weight_ok"])
    a.tap("dashboard", "btn_start_workout", "workout")
    a.tap("dashboard", "btn_history", "history")
    a.long_tap("workout", "btn_stop", "summary")
    a.tap("summary", "btn_rate", "rate")
    a.input("rate", "rating_note", r".+", "note_ok")
    a.tap("rate", "btn_rate_done", "history", requires=["note_ok"])
    return a


APPS = [mail, policy_agree, quiz_fr, quiz_zh, login, shop, bank, wizard, news_ja, fitness]


def main():
    out_dir = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "fixtures", "suite")
    os.makedirs(out_dir, exist_ok=True)
    rules = []
    keys = set()
    manifest = {}
    for make in APPS:
        app = make()
        for r in app.rules:
            if r["contains"] in keys:
                raise SystemExit(f"rule key reused: {r['contains']}")
            keys.add(r["contains"])
        rules.extend(app.rules)
        manifest[app.app_id] = {"category": app.category, "rating": app.rating, "installs": app.installs}
        path = os.path.join(out_dir, app.app_id + ".json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump(app.to_json(), f, ensure_ascii=False, indent=1)
            f.write("\n")
    with open(os.path.join(out_dir, "semantic.rules.json"), "w", encoding="utf-8") as f:
        json.dump({"rules": rules, "default_reply": "[scroll] [down]"}, f, ensure_ascii=False, indent=1)
        f.write("\n")
    with open(os.path.join(out_dir, "apps.manifest.json"), "w", encoding="utf-8") as f:
        json.dump(manifest, f, ensure_ascii=False, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main()

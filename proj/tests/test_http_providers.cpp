#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>

#include "foresight/providers_http.hpp"
#include "testutil.hpp"

using namespace foresight;

namespace {

// Local HTTP server standing in for the external APIs.
class LocalServer {
public:
    LocalServer() {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                    httplib::Response& res) {
            ++completion_calls;
            last_auth = req.get_header_value("Authorization");
            if (fail_remaining > 0) {
                --fail_remaining;
                res.status = 500;
                return;
            }
            auto body = nlohmann::json::parse(req.body);
            last_model = body.at("model").get<std::string>();
            last_temperature = body.at("temperature").get<double>();
            nlohmann::json out = {
                {"choices",
                 {{{"message", {{"role", "assistant"}, {"content", "scripted *0.41*"}}}}}}};
            res.set_content(out.dump(), "application/json");
        });
        server_.Get("/v2/search", [this](const httplib::Request& req, httplib::Response& res) {
            last_query = req.get_param_value("q");
            nlohmann::json articles = nlohmann::json::array();
            articles.push_back({{"title", "In range"},
                                {"link", "https://news.example.org/a"},
                                {"summary", "body text"},
                                {"published_date", "2023-01-05 12:00:00"}});
            articles.push_back({{"title", "Too old"},
                                {"link", "https://news.example.org/b"},
                                {"summary", "body text"},
                                {"published_date", "2021-01-01"}});
            articles.push_back({{"title", "Undated"},
                                {"link", "https://news.example.org/c"},
                                {"summary", "body text"}});
            res.set_content(nlohmann::json{{"articles", articles}}.dump(),
                            "application/json");
        });
        server_.Get("/page", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("<html><head><title>A Page</title>"
                            "<meta property=\"article:published_time\" "
                            "content=\"2023-01-04T10:00:00Z\"></head>"
                            "<body><script>junk()</script><p>Real text.</p></body></html>",
                            "text/html");
        });
        server_.Get("/undated", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("<html><head><title>No date</title></head><body>x</body></html>",
                            "text/html");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~LocalServer() {
        server_.stop();
        thread_.join();
    }

    std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

    std::atomic<int> completion_calls{0};
    std::atomic<int> fail_remaining{0};
    std::string last_auth, last_model, last_query;
    double last_temperature = -1.0;

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

struct EnvKey {
    EnvKey() { ::setenv("FORESIGHT_TEST_KEY", "sk-test-123", 1); }
};

}  // namespace

TEST(HttpCompletion, PostsAndParses) {
    EnvKey env;
    LocalServer server;
    HttpCompletionProvider provider(server.base_url(), "FORESIGHT_TEST_KEY",
                                    HttpOptions{0, 1, 0, 5});
    auto text = provider.complete("gpt-4-1106-preview", "What now?", 0.25, 128);
    EXPECT_EQ(text, "scripted *0.41*");
    EXPECT_EQ(server.last_model, "gpt-4-1106-preview");
    EXPECT_DOUBLE_EQ(server.last_temperature, 0.25);
    EXPECT_EQ(server.last_auth, "Bearer sk-test-123");
}

TEST(HttpCompletion, RetriesServerErrors) {
    EnvKey env;
    LocalServer server;
    server.fail_remaining = 2;
    HttpCompletionProvider provider(server.base_url(), "FORESIGHT_TEST_KEY",
                                    HttpOptions{2, 1, 0, 5});
    EXPECT_EQ(provider.complete("m", "p", 0.0, 16), "scripted *0.41*");
    EXPECT_EQ(server.completion_calls.load(), 3);

    server.fail_remaining = 10;
    EXPECT_THROW(provider.complete("m", "p", 0.0, 16), ProviderError);
}

TEST(HttpCompletion, MissingKeyIsConfigError) {
    ::unsetenv("FORESIGHT_TEST_MISSING");
    EXPECT_THROW(
        HttpCompletionProvider("http://127.0.0.1:1", "FORESIGHT_TEST_MISSING"),
        ConfigError);
}

TEST(HttpNews, FiltersUndatedAndOutOfRange) {
    EnvKey env;
    LocalServer server;
    HttpNewsProvider provider(server.base_url(), "FORESIGHT_TEST_KEY", HttpOptions{0, 1, 0, 5});
    auto articles = provider.search("election", Date(2023, 1, 1), Date(2023, 1, 10), 10);
    ASSERT_EQ(articles.size(), 1u);
    EXPECT_EQ(articles[0].title, "In range");
    EXPECT_EQ(articles[0].publish_date, Date(2023, 1, 5));
    EXPECT_EQ(articles[0].search_query, "election");
    EXPECT_EQ(server.last_query, "election");
}

TEST(HttpUrlFetcher, KeepsDatedPagesOnly) {
    LocalServer server;
    HttpUrlFetcher fetcher(HttpOptions{0, 1, 0, 5});
    auto page = fetcher.fetch(server.base_url() + "/page");
    ASSERT_TRUE(page.has_value());
    EXPECT_EQ(page->title, "A Page");
    EXPECT_EQ(page->publish_date, Date(2023, 1, 4));
    EXPECT_NE(page->full_text.find("Real text."), std::string::npos);
    EXPECT_EQ(page->full_text.find("junk"), std::string::npos);  // script stripped

    EXPECT_FALSE(fetcher.fetch(server.base_url() + "/undated").has_value());
    EXPECT_FALSE(fetcher.fetch("not a url").has_value());
}

#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace CLI {
class App;
}

namespace tweetforge::cli {

struct Streams {
  std::istream* in;
  std::ostream* out;
  std::ostream* err;
};

// Exit codes: 0 ok, 1 stage failure, 2 usage or configuration error.
int run(const std::vector<std::string>& args, const Streams& io);
int main(int argc, char** argv);

// The full command tree, for introspection (help lint).
std::unique_ptr<CLI::App> make_app();

}  // namespace tweetforge::cli

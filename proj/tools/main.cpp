#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <future>
#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  const long limit = hrush::cli::timeout_ms(args);
  if (limit <= 0) return hrush::cli::run(args, std::cout, std::cerr);

  std::ostringstream out, err;
  auto done = std::async(std::launch::async, [&] { return hrush::cli::run(args, out, err); });
  if (done.wait_for(std::chrono::milliseconds(limit)) == std::future_status::timeout) {
    std::cerr << "budget exceeded: timed out after " << limit << " ms\n";
    std::_Exit(1);
  }
  const int code = done.get();
  std::cout << out.str();
  std::cerr << err.str();
  return code;
}

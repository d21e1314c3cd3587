#include "cli.hpp"

int main(int argc, char** argv) { return tweetforge::cli::main(argc, argv); }

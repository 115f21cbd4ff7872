#include <gemkit/cli.hpp>

int main(int argc, char** argv) { return gemkit::cli::main_entry(argc, argv); }

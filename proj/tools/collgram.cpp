#include "collgram/cli.hpp"

int main(int argc, char** argv) { return collgram::cli::run(argc, argv); }

#include "aal/cli.hpp"

int main(int argc, char** argv) { return aal::cli::run(argc, argv); }

#include "dynsvd/cli_app.hpp"

int main(int argc, char** argv) { return dynsvd::cli_main(argc, argv); }

#include "qrob/cli.hpp"

int main(int argc, char** argv) { return qrob::cli_main(argc, argv); }

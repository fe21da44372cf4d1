#include "irec/cli/app.hpp"

int main(int argc, char** argv) { return irec::cli::run(argc, argv); }

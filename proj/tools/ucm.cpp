#include "ucm/cli.hpp"

int main(int argc, char** argv) {
    return ucm::run_cli(argc, argv);
}

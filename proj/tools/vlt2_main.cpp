#include <cstdio>

int main() {
    std::puts("vlt2: placeholder");
    return 0;
}

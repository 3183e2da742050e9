#include <iostream>

#include "fe/render.hpp"

int main() {
    std::cout << "fe: placeholder\n";
    return 0;
}

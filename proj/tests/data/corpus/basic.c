#include <stdio.h>

int emptyish(int x) {
    return x + 1;
}

int clampz(int x) {
    if (x < 0) {
        return 0;
    }
    return x;
}

#include <stdio.h>
#include <stdlib.h>
#include "battlesheep.h"

int main(int argc, char **argv) {
    if (argc < 2) return 2;
    FILE *f = fopen(argv[1], "rb");
    if (!f) return 2;
    char buf[4096];
    size_t len = fread(buf, 1, sizeof buf - 1, f);
    fclose(f);
    buf[len] = 0;

    BsPosition *p = NULL;
    if (bs_position_parse(buf, &p) != BS_STATUS_OK) {
        fprintf(stderr, "%s\n", bs_last_error());
        return 1;
    }
    size_t n = 0;
    bs_position_move_count(p, &n);
    printf("moves %zu %s\n", n, bs_position_to_move(p) == 0 ? "blue" : "red");
    bs_position_free(p);
    return 0;
}

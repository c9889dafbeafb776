/* Subset-sum via backtracking: sample target program for pass-sequence
 * tuning. Deterministic: the input set comes from a fixed LCG, so both
 * the printed answer and the workload are identical on every run. */
#include <stdio.h>

#define N 26

static unsigned lcg_state = 123456789u;

static unsigned lcg_next(void) {
    lcg_state = lcg_state * 1664525u + 1013904223u;
    return lcg_state;
}

static long long found;

static void backtrack(const long long *set, int n, int i, long long remaining) {
    if (remaining == 0) {
        found++;
        return;
    }
    if (i >= n || remaining < 0)
        return;
    backtrack(set, n, i + 1, remaining - set[i]);
    backtrack(set, n, i + 1, remaining);
}

int main(void) {
    long long set[N];
    long long total = 0;

    for (int i = 0; i < N; i++) {
        set[i] = (long long)(lcg_next() % 1000u) + 1;
        total += set[i];
    }

    long long target = total / 3;
    found = 0;
    backtrack(set, N, 0, target);
    printf("subsets hitting %lld: %lld\n", target, found);
    return 0;
}

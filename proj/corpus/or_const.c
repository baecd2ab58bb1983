int main(void) {
  int x = __VERIFIER_nondet_int();
  int y;
  int steps = 0;
  assume(x >= 0 && x < 1000);
  while (steps < 20) {
    y = x | 8;
    x = y - 8;
    steps++;
  }
  assert(y >= 8);
  return 0;
}

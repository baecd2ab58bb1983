// Branch-free absolute value.
int main(void) {
  int x = __VERIFIER_nondet_int();
  int m;
  int y;
  assume(x > -1000000 && x < 1000000);
  m = x >> 31;
  y = x ^ m;
  y = y - m;
  assert(y >= 0);
  return 0;
}

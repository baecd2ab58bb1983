int main(void) {
  int x = __VERIFIER_nondet_int();
  int y = __VERIFIER_nondet_int();
  int r = __VERIFIER_nondet_int();
  assume(x >= 0 && y >= 0);
  assume(r == (x & y));
  assert(r <= x);
  return 0;
}

int main(void) {
  int a = __VERIFIER_nondet_int();
  int b = __VERIFIER_nondet_int();
  int c;
  assume(a < 0 && b < 0);
  c = a | b;
  assert(c < 0);
  return 0;
}

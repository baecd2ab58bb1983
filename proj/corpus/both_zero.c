int main(void) {
  int a = __VERIFIER_nondet_int();
  int b = __VERIFIER_nondet_int();
  assume(a == 0 || a == 1);
  assume(b == 0 || b == 1);
  assume((a | b) == 0);
  assert(a == 0 && b == 0);
  return 0;
}

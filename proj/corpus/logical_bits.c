int main(void) {
  int p = __VERIFIER_nondet_int();
  int q = __VERIFIER_nondet_int();
  int both;
  int either;
  int differ;
  assume(p == 0 || p == 1);
  assume(q == 0 || q == 1);
  both = (p & q) + 0;
  either = (p | q) + 0;
  differ = (p ^ q) + 0;
  assert(both <= either);
  return 0;
}

// Round up to a power of two.
int main(void) {
  int v = __VERIFIER_nondet_int();
  assume(v > 0 && v < 1048576);
  v = v - 1;
  v = v | (v >> 1);
  v = v | (v >> 2);
  v = v | (v >> 4);
  v = v | (v >> 8);
  v = v | (v >> 16);
  v = v + 1;
  assert(v > 0);
  return 0;
}

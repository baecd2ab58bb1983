// Kernighan bit count.
int main(void) {
  int x = __VERIFIER_nondet_int();
  int count = 0;
  assume(x >= 0);
  while (x != 0) {
    x = x & (x - 1);
    count++;
  }
  assert(count <= 31);
  return 0;
}

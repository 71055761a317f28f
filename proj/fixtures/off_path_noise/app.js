function dangeroustj1(cmd) {
  eval(cmd);
  return 0;
}
const actionstj1 = { danger: dangeroustj1 };
const picktj1 = 'danger';
const payloadtj1 = location.hash;
actionstj1[picktj1](payloadtj1);
function noisetj10(k) {
  const table = { go: function (x) { return x + 0; } };
  const fn = table[k];
  return fn(0);
}
function noisetj11(k) {
  const table = { go: function (x) { return x + 1; } };
  const fn = table[k];
  return fn(1);
}
function noisetj12(k) {
  const table = { go: function (x) { return x + 2; } };
  const fn = table[k];
  return fn(2);
}
function noisetj13(k) {
  const table = { go: function (x) { return x + 3; } };
  const fn = table[k];
  return fn(3);
}
function noisetj14(k) {
  const table = { go: function (x) { return x + 4; } };
  const fn = table[k];
  return fn(4);
}
function noisetj15(k) {
  const table = { go: function (x) { return x + 5; } };
  const fn = table[k];
  return fn(5);
}
function noisetj16(k) {
  const table = { go: function (x) { return x + 6; } };
  const fn = table[k];
  return fn(6);
}
function noisetj17(k) {
  const table = { go: function (x) { return x + 7; } };
  const fn = table[k];
  return fn(7);
}
function noisetj18(k) {
  const table = { go: function (x) { return x + 8; } };
  const fn = table[k];
  return fn(8);
}
function noisetj19(k) {
  const table = { go: function (x) { return x + 9; } };
  const fn = table[k];
  return fn(9);
}
function noisetj110(k) {
  const table = { go: function (x) { return x + 10; } };
  const fn = table[k];
  return fn(10);
}
function noisetj111(k) {
  const table = { go: function (x) { return x + 11; } };
  const fn = table[k];
  return fn(11);
}
function noisetj112(k) {
  const table = { go: function (x) { return x + 12; } };
  const fn = table[k];
  return fn(12);
}
function noisetj113(k) {
  const table = { go: function (x) { return x + 13; } };
  const fn = table[k];
  return fn(13);
}
function noisetj114(k) {
  const table = { go: function (x) { return x + 14; } };
  const fn = table[k];
  return fn(14);
}
function noisetj115(k) {
  const table = { go: function (x) { return x + 15; } };
  const fn = table[k];
  return fn(15);
}
function noisetj116(k) {
  const table = { go: function (x) { return x + 16; } };
  const fn = table[k];
  return fn(16);
}
function noisetj117(k) {
  const table = { go: function (x) { return x + 17; } };
  const fn = table[k];
  return fn(17);
}
function noisetj118(k) {
  const table = { go: function (x) { return x + 18; } };
  const fn = table[k];
  return fn(18);
}
function noisetj119(k) {
  const table = { go: function (x) { return x + 19; } };
  const fn = table[k];
  return fn(19);
}
function noisetj120(k) {
  const table = { go: function (x) { return x + 20; } };
  const fn = table[k];
  return fn(20);
}
function noisetj121(k) {
  const table = { go: function (x) { return x + 21; } };
  const fn = table[k];
  return fn(21);
}
function noisetj122(k) {
  const table = { go: function (x) { return x + 22; } };
  const fn = table[k];
  return fn(22);
}
function noisetj123(k) {
  const table = { go: function (x) { return x + 23; } };
  const fn = table[k];
  return fn(23);
}
function noisetj124(k) {
  const table = { go: function (x) { return x + 24; } };
  const fn = table[k];
  return fn(24);
}
function noisetj125(k) {
  const table = { go: function (x) { return x + 25; } };
  const fn = table[k];
  return fn(25);
}
function noisetj126(k) {
  const table = { go: function (x) { return x + 26; } };
  const fn = table[k];
  return fn(26);
}
function noisetj127(k) {
  const table = { go: function (x) { return x + 27; } };
  const fn = table[k];
  return fn(27);
}
function noisetj128(k) {
  const table = { go: function (x) { return x + 28; } };
  const fn = table[k];
  return fn(28);
}
function noisetj129(k) {
  const table = { go: function (x) { return x + 29; } };
  const fn = table[k];
  return fn(29);
}
function noisetj130(k) {
  const table = { go: function (x) { return x + 30; } };
  const fn = table[k];
  return fn(30);
}
function noisetj131(k) {
  const table = { go: function (x) { return x + 31; } };
  const fn = table[k];
  return fn(31);
}
function noisetj132(k) {
  const table = { go: function (x) { return x + 32; } };
  const fn = table[k];
  return fn(32);
}
function noisetj133(k) {
  const table = { go: function (x) { return x + 33; } };
  const fn = table[k];
  return fn(33);
}
function noisetj134(k) {
  const table = { go: function (x) { return x + 34; } };
  const fn = table[k];
  return fn(34);
}
function noisetj135(k) {
  const table = { go: function (x) { return x + 35; } };
  const fn = table[k];
  return fn(35);
}
function noisetj136(k) {
  const table = { go: function (x) { return x + 36; } };
  const fn = table[k];
  return fn(36);
}
function noisetj137(k) {
  const table = { go: function (x) { return x + 37; } };
  const fn = table[k];
  return fn(37);
}
function noisetj138(k) {
  const table = { go: function (x) { return x + 38; } };
  const fn = table[k];
  return fn(38);
}
function noisetj139(k) {
  const table = { go: function (x) { return x + 39; } };
  const fn = table[k];
  return fn(39);
}
function noisetj140(k) {
  const table = { go: function (x) { return x + 40; } };
  const fn = table[k];
  return fn(40);
}
function noisetj141(k) {
  const table = { go: function (x) { return x + 41; } };
  const fn = table[k];
  return fn(41);
}
function noisetj142(k) {
  const table = { go: function (x) { return x + 42; } };
  const fn = table[k];
  return fn(42);
}
function noisetj143(k) {
  const table = { go: function (x) { return x + 43; } };
  const fn = table[k];
  return fn(43);
}
function noisetj144(k) {
  const table = { go: function (x) { return x + 44; } };
  const fn = table[k];
  return fn(44);
}
function noisetj145(k) {
  const table = { go: function (x) { return x + 45; } };
  const fn = table[k];
  return fn(45);
}
function noisetj146(k) {
  const table = { go: function (x) { return x + 46; } };
  const fn = table[k];
  return fn(46);
}
function noisetj147(k) {
  const table = { go: function (x) { return x + 47; } };
  const fn = table[k];
  return fn(47);
}
function noisetj148(k) {
  const table = { go: function (x) { return x + 48; } };
  const fn = table[k];
  return fn(48);
}
function noisetj149(k) {
  const table = { go: function (x) { return x + 49; } };
  const fn = table[k];
  return fn(49);
}

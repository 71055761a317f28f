function produce() { return 'literal'; }
const callbacks = { first: produce };
const key = 'first';
const s = callbacks[key]();
eval(s);

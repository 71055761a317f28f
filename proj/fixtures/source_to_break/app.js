function record(v) { log(v); return 0; }
const callbacks = { first: record };
const key = 'first';
const userInput = location.hash;
callbacks[key](userInput);

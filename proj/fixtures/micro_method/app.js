function send(input) {
  const client = make(input);
  const out = client.post();
  return `<span>${out}</span>`;
}
module.exports = send;

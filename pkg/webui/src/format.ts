// Display formatting. Indian digit grouping: last three digits, then pairs.

export function groupIndian(integer: string): string {
  if (integer.length <= 3) return integer;
  const head = integer.slice(0, -3);
  const tail = integer.slice(-3);
  const pairs: string[] = [];
  for (let i = head.length; i > 0; i -= 2) {
    pairs.unshift(head.slice(Math.max(0, i - 2), i));
  }
  return `${pairs.join(",")},${tail}`;
}

/** Whole-rupee amount in Indian grouping, e.g. 347383 -> "₹ 3,47,383". */
export function formatInr(amount: number): string {
  const sign = amount < 0 ? "-" : "";
  const rounded = Math.round(Math.abs(amount));
  return `${sign}₹ ${groupIndian(String(rounded))}`;
}

/** Acres shown to exactly three decimals. */
export function formatAcres(acres: number): string {
  return acres.toFixed(3);
}

export function formatPrice(price: number): string {
  return price.toFixed(2);
}
